"""Numba-compiled factorization kernel (default backend).

Same entry contract as :mod:`polgd.kernels_numpy`, compiled per pixel with
sequential arithmetic. nogil so the tiled pipeline can run kernels from a
thread pool; cache so the compilation cost is paid once per machine.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .spff import GAMMA_MAX, GAMMA_MIN
from .spff import _C33_FLOOR as C33_FLOOR
from .spff import _TIE_TOL as TIE_TOL

_FOUR_OVER_PI = 4.0 / np.pi
_DEG2RAD = np.pi / 180.0


@njit(cache=True, nogil=True)
def _gd_unit16(u, v):
    num = 0.0
    den = 0.0
    for i in range(16):
        d = u[i] - v[i]
        s = u[i] + v[i]
        num += d * d
        den += s * s
    gd = _FOUR_OVER_PI * math.atan2(math.sqrt(num), math.sqrt(den))
    return gd if gd < 1.0 else 1.0


@njit(cache=True, nogil=True)
def _factorize_block_jit(
    kflat,
    c11,
    c33,
    valid,
    cols,
    inv_col_norms,
    theta_deg,
    target_units,
    tri_unit,
    group_code,
    alpha_lo,
    alpha_hi,
    include_volume,
    branch_swapped,
    powers,
    p_rv,
    p_res,
    theta_ms,
    best,
    branch,
    dominant,
    gamma_out,
    gflag,
):
    n = kflat.shape[0]
    ncols = cols.shape[0]
    ntgt = target_units.shape[0]
    ncomp = ntgt + 1 if include_volume else ntgt

    khat = np.empty(16)
    kms = np.empty(16)
    krv = np.empty(16)
    sims = np.empty(ncomp)
    order = np.empty(ncomp, dtype=np.int64)
    w = np.empty(ncomp)
    scores = np.empty(ncols)

    for p in range(n):
        if not valid[p]:
            continue
        k = kflat[p]

        nk2 = 0.0
        for i in range(16):
            nk2 += k[i] * k[i]
        nk = math.sqrt(nk2)
        for i in range(16):
            khat[i] = k[i] / nk

        alpha = 90.0 * _gd_unit16(khat, tri_unit)
        in_window = alpha >= alpha_lo and alpha < alpha_hi
        branch_a = in_window != branch_swapped

        # orientation search; per-pixel 1/nk dropped, it cannot change the
        # ranking, and scores within a round-off band of the maximum count
        # as tied with the earliest grid column winning (see kernels_numpy)
        best_score = -np.inf
        for j in range(ncols):
            ip = 0.0
            for i in range(16):
                ip += cols[j, i] * k[i]
            scores[j] = ip * inv_col_norms[j]
            if scores[j] > best_score:
                best_score = scores[j]
        cut = best_score - TIE_TOL * nk
        hit = 0
        for j in range(ncols):
            if scores[j] >= cut:
                hit = j
                break
        t_idx = hit % ntgt
        th = theta_deg[hit // ntgt]

        c2 = math.cos(2.0 * th * _DEG2RAD)
        s2 = math.sin(2.0 * th * _DEG2RAD)
        # R K R^T restricted to the (1,2) block that actually rotates
        k11, k12 = k[5], k[6]
        k21, k22 = k[9], k[10]
        a11 = c2 * k11 - s2 * k21
        a12 = c2 * k12 - s2 * k22
        a21 = s2 * k11 + c2 * k21
        a22 = s2 * k12 + c2 * k22
        for i in range(16):
            kms[i] = k[i]
        kms[5] = a11 * c2 - a12 * s2
        kms[6] = a11 * s2 + a12 * c2
        kms[9] = a21 * c2 - a22 * s2
        kms[10] = a21 * s2 + a22 * c2
        kms[1] = c2 * k[1] - s2 * k[2]
        kms[2] = s2 * k[1] + c2 * k[2]
        kms[4] = c2 * k[4] - s2 * k[8]
        kms[8] = s2 * k[4] + c2 * k[8]
        kms[7] = c2 * k[7] - s2 * k[11]
        kms[11] = s2 * k[7] + c2 * k[11]
        kms[13] = c2 * k[13] - s2 * k[14]
        kms[14] = s2 * k[13] + c2 * k[14]

        nm2 = 0.0
        for i in range(16):
            nm2 += kms[i] * kms[i]
        nm = math.sqrt(nm2)
        for i in range(16):
            kms[i] /= nm

        for j in range(ntgt):
            sims[j] = 1.0 - _gd_unit16(kms, target_units[j])

        if c33[p] <= C33_FLOOR:
            g = GAMMA_MAX
            gf = True
        else:
            g = c11[p] / c33[p]
            gf = g < GAMMA_MIN or g > GAMMA_MAX
            if g < GAMMA_MIN:
                g = GAMMA_MIN
            elif g > GAMMA_MAX:
                g = GAMMA_MAX

        if include_volume:
            rg = math.sqrt(g)
            denom = 3.0 * (1.0 + g) / 4.0 - rg / 6.0
            for i in range(16):
                krv[i] = 0.0
            krv[0] = (3.0 / 2.0 * (1.0 + g) - rg / 3.0) / denom
            krv[1] = (g - 1.0) / denom
            krv[4] = (g - 1.0) / denom
            krv[5] = ((1.0 + g) / 2.0 + rg / 3.0) / denom
            krv[10] = ((1.0 + g) / 2.0 + rg / 3.0) / denom
            krv[15] = ((1.0 + g) / 2.0 - rg) / denom
            nv2 = 0.0
            for i in range(16):
                nv2 += krv[i] * krv[i]
            nv = math.sqrt(nv2)
            for i in range(16):
                krv[i] /= nv
            sims[ntgt] = 1.0 - _gd_unit16(kms, krv)

        # stable descending insertion sort of component indices
        if branch_a or not include_volume:
            nsort = ncomp
        else:
            nsort = ntgt
            order[ntgt] = ntgt
        for j in range(nsort):
            order[j] = j
        for j in range(1, nsort):
            oj = order[j]
            sj = sims[oj]
            i = j - 1
            while i >= 0 and sims[order[i]] < sj:
                order[i + 1] = order[i]
                i -= 1
            order[i + 1] = oj

        r = 1.0
        for j in range(ncomp):
            x = sims[order[j]]
            w[order[j]] = x * r
            r *= 1.0 - x

        sp = 2.0 * k[0]
        odd = 0.0
        even = 0.0
        hlx = 0.0
        for j in range(ntgt):
            pw = w[j] * sp
            powers[p, j] = pw
            if group_code[j] == 1:
                odd += pw
            elif group_code[j] == 3:
                even += pw
            elif group_code[j] == 4:
                hlx += pw
        vol_p = w[ntgt] * sp if include_volume else 0.0
        res = r * sp
        rand = vol_p + res

        dom = 1
        dbest = odd
        if rand > dbest:
            dom = 2
            dbest = rand
        if even > dbest:
            dom = 3
            dbest = even
        if hlx > dbest:
            dom = 4

        p_rv[p] = vol_p
        p_res[p] = res
        theta_ms[p] = th
        gamma_out[p] = g
        best[p] = t_idx + 1
        branch[p] = 1 if branch_a else 2
        dominant[p] = dom
        gflag[p] = 1 if gf else 0


def factorize_block(
    kflat,
    c11,
    c33,
    valid,
    cols,
    inv_col_norms,
    theta_deg,
    target_units,
    tri_unit,
    group_code,
    alpha_lo,
    alpha_hi,
    include_volume,
    branch_swapped,
):
    n = kflat.shape[0]
    ntgt = target_units.shape[0]
    powers = np.full((n, ntgt), np.nan, dtype=np.float64)
    p_rv = np.full(n, np.nan, dtype=np.float64)
    p_res = np.full(n, np.nan, dtype=np.float64)
    theta_ms = np.full(n, np.nan, dtype=np.float64)
    gamma_out = np.full(n, np.nan, dtype=np.float64)
    best = np.zeros(n, dtype=np.uint8)
    branch = np.zeros(n, dtype=np.uint8)
    dominant = np.zeros(n, dtype=np.uint8)
    gflag = np.zeros(n, dtype=np.uint8)
    _factorize_block_jit(
        np.ascontiguousarray(kflat, dtype=np.float64),
        np.ascontiguousarray(c11, dtype=np.float64),
        np.ascontiguousarray(c33, dtype=np.float64),
        np.ascontiguousarray(valid),
        cols,
        inv_col_norms,
        theta_deg,
        target_units,
        tri_unit,
        group_code,
        float(alpha_lo),
        float(alpha_hi),
        bool(include_volume),
        bool(branch_swapped),
        powers,
        p_rv,
        p_res,
        theta_ms,
        best,
        branch,
        dominant,
        gamma_out,
        gflag,
    )
    return powers, p_rv, p_res, theta_ms, best, branch, dominant, gamma_out, gflag
