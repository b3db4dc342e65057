"""Pure-numpy factorization kernel (fallback backend).

Same entry contract as :mod:`polgd.kernels_numba`; see
:func:`polgd.backend.factorize_block` for the argument layout. Works in
fixed-size row chunks so intermediate sizes stay bounded and results do not
depend on tiling or worker count.
"""

from __future__ import annotations

import numpy as np

from .spff import GAMMA_MAX, GAMMA_MIN
from .spff import _C33_FLOOR, _TIE_TOL

_CHUNK = 2048
_FOUR_OVER_PI = 4.0 / np.pi


def _gd_unit_rows(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """GD between unit row vectors u (n,16) and a unit vector v (16,)."""
    num = np.sqrt(np.sum((u - v) ** 2, axis=1))
    den = np.sqrt(np.sum((u + v) ** 2, axis=1))
    return np.minimum(_FOUR_OVER_PI * np.arctan2(num, den), 1.0)


def _grvm_rows(g: np.ndarray) -> np.ndarray:
    """Random-volume Kennaugh rows (n, 16) for ratio values g (n,)."""
    rg = np.sqrt(g)
    denom = 3.0 * (1.0 + g) / 4.0 - rg / 6.0
    k00 = 3.0 / 2.0 * (1.0 + g) - rg / 3.0
    k01 = g - 1.0
    k11 = (1.0 + g) / 2.0 + rg / 3.0
    k33 = (1.0 + g) / 2.0 - rg
    out = np.zeros((g.size, 16), dtype=np.float64)
    out[:, 0] = k00
    out[:, 1] = k01
    out[:, 4] = k01
    out[:, 5] = k11
    out[:, 10] = k11
    out[:, 15] = k33
    out /= denom[:, None]
    return out


def _gamma_rows(c11: np.ndarray, c33: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    floored = c33 <= _C33_FLOOR
    q = c11 / np.where(floored, 1.0, c33)
    gamma = np.where(floored, GAMMA_MAX, np.clip(q, GAMMA_MIN, GAMMA_MAX))
    flag = floored | (~floored & ((q < GAMMA_MIN) | (q > GAMMA_MAX)))
    return gamma, flag


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
    ncomp = ntgt + 1 if include_volume else ntgt

    powers = np.full((n, ntgt), np.nan, dtype=np.float64)
    p_rv = np.full(n, np.nan, dtype=np.float64)
    p_res = np.full(n, np.nan, dtype=np.float64)
    theta_ms = np.full(n, np.nan, dtype=np.float64)
    gamma_out = np.full(n, np.nan, dtype=np.float64)
    best = np.zeros(n, dtype=np.uint8)
    branch = np.zeros(n, dtype=np.uint8)
    dominant = np.zeros(n, dtype=np.uint8)
    gflag = np.zeros(n, dtype=np.uint8)

    idx = np.nonzero(valid)[0]
    for start in range(0, idx.size, _CHUNK):
        rows = idx[start : start + _CHUNK]
        k = kflat[rows]
        nk = np.sqrt(np.sum(k * k, axis=1))
        khat = k / nk[:, None]

        alpha = 90.0 * _gd_unit_rows(khat, tri_unit)
        in_window = (alpha >= alpha_lo) & (alpha < alpha_hi)
        branch_a = in_window != branch_swapped

        # orientation search: the per-row 1/nk factor cannot change the
        # ranking and is dropped; scores within a round-off band of the
        # maximum count as tied and the earliest grid column wins, so that
        # rotation-invariant targets land on theta = 0 instead of wherever
        # accumulated rounding happens to peak
        scores = (k @ cols.T) * inv_col_norms
        hit = np.argmax(scores >= scores.max(axis=1)[:, None] - _TIE_TOL * nk[:, None], axis=1)
        t_idx = (hit % ntgt).astype(np.uint8)
        th = theta_deg[hit // ntgt]

        c2 = np.cos(2.0 * np.deg2rad(th))
        s2 = np.sin(2.0 * np.deg2rad(th))
        m = rows.size
        rot = np.zeros((m, 4, 4), dtype=np.float64)
        rot[:, 0, 0] = 1.0
        rot[:, 3, 3] = 1.0
        rot[:, 1, 1] = c2
        rot[:, 2, 2] = c2
        rot[:, 1, 2] = -s2
        rot[:, 2, 1] = s2
        kms = rot @ k.reshape(m, 4, 4) @ rot.transpose(0, 2, 1)
        kms = kms.reshape(m, 16)
        kms_hat = kms / np.sqrt(np.sum(kms * kms, axis=1))[:, None]

        sims = np.empty((m, ncomp), dtype=np.float64)
        for j in range(ntgt):
            sims[:, j] = 1.0 - _gd_unit_rows(kms_hat, target_units[j])

        g, gf = _gamma_rows(c11[rows], c33[rows])
        if include_volume:
            krv = _grvm_rows(g)
            krv_hat = krv / np.sqrt(np.sum(krv * krv, axis=1))[:, None]
            num = np.sqrt(np.sum((kms_hat - krv_hat) ** 2, axis=1))
            den = np.sqrt(np.sum((kms_hat + krv_hat) ** 2, axis=1))
            gd_v = np.minimum(_FOUR_OVER_PI * np.arctan2(num, den), 1.0)
            sims[:, ntgt] = 1.0 - gd_v

        order = np.argsort(-sims, axis=1, kind="stable")
        if include_volume:
            order_b = np.concatenate(
                [
                    np.argsort(-sims[:, :ntgt], axis=1, kind="stable"),
                    np.full((m, 1), ntgt, dtype=np.intp),
                ],
                axis=1,
            )
            order = np.where(branch_a[:, None], order, order_b)

        s_ord = np.take_along_axis(sims, order, axis=1)
        q = np.cumprod(1.0 - s_ord, axis=1)
        w_ord = np.empty_like(s_ord)
        w_ord[:, 0] = s_ord[:, 0]
        w_ord[:, 1:] = s_ord[:, 1:] * q[:, :-1]
        w = np.empty_like(w_ord)
        np.put_along_axis(w, order, w_ord, axis=1)

        sp = 2.0 * k[:, 0]
        pw = w * sp[:, None]
        res = q[:, -1] * sp

        grp = np.empty((m, 4), dtype=np.float64)
        vol_p = pw[:, ntgt] if include_volume else np.zeros(m)
        grp[:, 0] = np.sum(pw[:, :ntgt] * (group_code == 1), axis=1)
        grp[:, 1] = vol_p + res
        grp[:, 2] = np.sum(pw[:, :ntgt] * (group_code == 3), axis=1)
        grp[:, 3] = np.sum(pw[:, :ntgt] * (group_code == 4), axis=1)

        powers[rows] = pw[:, :ntgt]
        p_rv[rows] = vol_p
        p_res[rows] = res
        theta_ms[rows] = th
        gamma_out[rows] = g
        best[rows] = t_idx + 1
        branch[rows] = np.where(branch_a, 1, 2).astype(np.uint8)
        dominant[rows] = (np.argmax(grp, axis=1) + 1).astype(np.uint8)
        gflag[rows] = gf.astype(np.uint8)

    return powers, p_rv, p_res, theta_ms, best, branch, dominant, gamma_out, gflag
