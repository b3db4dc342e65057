"""Tiled raster pipeline over coherency stacks.

Jobs run over horizontal tile strips, optionally in a thread pool; every
tile writes a disjoint slice of preallocated outputs, so results are
bit-identical for any worker count and any tile height. Masked-out input
pixels propagate as NaN in float products and 0 in byte products.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import classify as _classify
from .algebra import ElementaryTarget, elementary_target
from .backend import get_backend
from .kernels_numpy import _gd_unit_rows
from .raster import RasterStack
from .spff import SpffConfig, _GROUP_OF_TARGET, _grid_tables

__all__ = ["run_pipeline", "PIPELINE_JOBS", "rgb_from_powers"]

log = logging.getLogger(__name__)

PIPELINE_JOBS = ("params", "classify", "spff", "rgb")

_TRI_UNIT = elementary_target(ElementaryTarget.TRIHEDRAL).ravel() / 2.0
_LH_UNIT = elementary_target(ElementaryTarget.LEFT_HELIX).ravel() / 2.0
_RH_UNIT = elementary_target(ElementaryTarget.RIGHT_HELIX).ravel() / 2.0
_DEP_UNIT = elementary_target(ElementaryTarget.IDEAL_DEPOLARIZER).ravel()

_GROUP_CODE = {"odd": 1, "rand": 2, "even": 3, "hlx": 4}


def _prepare_rows(t3: np.ndarray):
    """Flatten (n, 3, 3) coherency pixels to Kennaugh rows plus gamma inputs."""
    t11 = t3[:, 0, 0].real
    t22 = t3[:, 1, 1].real
    t33 = t3[:, 2, 2].real
    re12 = t3[:, 0, 1].real
    im12 = t3[:, 0, 1].imag
    re13 = t3[:, 0, 2].real
    im13 = t3[:, 0, 2].imag
    re23 = t3[:, 1, 2].real
    im23 = t3[:, 1, 2].imag
    k = np.empty((t3.shape[0], 16), dtype=np.float64)
    k[:, 0] = (t11 + t22 + t33) / 2
    k[:, 1] = re12
    k[:, 2] = re13
    k[:, 3] = im23
    k[:, 5] = (t11 + t22 - t33) / 2
    k[:, 6] = re23
    k[:, 7] = im13
    k[:, 10] = (t11 - t22 + t33) / 2
    k[:, 11] = -im12
    k[:, 15] = (-t11 + t22 + t33) / 2
    k[:, 4], k[:, 8], k[:, 12] = k[:, 1], k[:, 2], k[:, 3]
    k[:, 9], k[:, 13], k[:, 14] = k[:, 6], k[:, 7], k[:, 11]
    c11 = (t11 + t22) / 2 + re12
    c33 = (t11 + t22) / 2 - re12
    return k, c11, c33


def _params_rows(kflat: np.ndarray, valid: np.ndarray):
    n = kflat.shape[0]
    out = {
        name: np.full(n, np.nan, dtype=np.float64)
        for name in ("alpha_gd", "tau_gd", "p_gd", "p_d", "span")
    }
    idx = np.nonzero(valid)[0]
    if idx.size:
        k = kflat[idx]
        k00 = k[:, 0]
        nk = np.sqrt(np.sum(k * k, axis=1))
        khat = k / nk[:, None]
        out["alpha_gd"][idx] = 90.0 * _gd_unit_rows(khat, _TRI_UNIT)
        gd_lh = _gd_unit_rows(khat, _LH_UNIT)
        gd_rh = _gd_unit_rows(khat, _RH_UNIT)
        out["tau_gd"][idx] = np.clip(45.0 * (1.0 - np.sqrt(gd_lh * gd_rh)), 0.0, 45.0)
        out["p_gd"][idx] = np.clip((1.5 * _gd_unit_rows(khat, _DEP_UNIT)) ** 2, 0.0, 1.0)
        num = np.maximum(np.sum(k * k, axis=1) - k00 * k00, 0.0)
        out["p_d"][idx] = np.clip(np.sqrt(num / (3.0 * k00 * k00)), 0.0, 1.0)
        out["span"][idx] = 2.0 * k00
    return out


def _tile_edges(height: int, tile_rows: int):
    step = max(int(tile_rows), 1)
    return [(r, min(r + step, height)) for r in range(0, height, step)]


def _run_tiles(height, tile_rows, workers, fn):
    edges = _tile_edges(height, tile_rows)
    if workers <= 1:
        for span in edges:
            fn(span)
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            list(pool.map(fn, edges))


def run_pipeline(
    stack: RasterStack,
    job: str,
    *,
    scheme: str = "pgd-alpha",
    spff_config: SpffConfig | None = None,
    workers: int = 1,
    tile_rows: int = 256,
) -> RasterStack:
    """Run one job over a stack and return a new stack of derived bands.

    jobs: "params" (roll-invariant parameter planes), "classify" (label
    plane for ``scheme``), "spff" (power factorization planes), "rgb"
    (grouped composite planes from an spff output stack).
    """
    if job not in PIPELINE_JOBS:
        raise ValueError(f"unknown job {job!r}, expected one of {PIPELINE_JOBS}")
    if job == "rgb":
        return rgb_from_powers(stack)

    if "t3" not in stack.bands:
        raise ValueError("stack lacks a 't3' matrix band")
    t3 = stack.bands["t3"]
    h, w = stack.height, stack.width
    finite = np.isfinite(t3).all(axis=(2, 3))
    trace = t3[:, :, 0, 0].real + t3[:, :, 1, 1].real + t3[:, :, 2, 2].real
    valid = stack.mask & finite & (trace > 0.0)
    n_dropped = int(stack.mask.sum() - valid.sum())
    if n_dropped:
        log.info("%d pixels masked out by validity checks", n_dropped)

    cfg = spff_config or SpffConfig()
    out = RasterStack(width=w, height=h, mask=valid.copy())
    out.meta = dict(stack.meta)
    out.meta["nodata_pixels"] = int(valid.size - valid.sum())

    if job in ("params", "classify"):
        bands = {
            name: np.full((h, w), np.nan, dtype=np.float64)
            for name in ("alpha_gd", "tau_gd", "p_gd", "p_d", "span")
        }

        def tile_params(edge):
            r0, r1 = edge
            t3rows = t3[r0:r1].reshape(-1, 3, 3)
            kflat, _, _ = _prepare_rows(t3rows)
            vals = _params_rows(kflat, valid[r0:r1].ravel())
            for name, arr in vals.items():
                bands[name][r0:r1] = arr.reshape(r1 - r0, w)

        _run_tiles(h, tile_rows, workers, tile_params)

        if job == "params":
            out.bands.update(bands)
            return out

        if scheme == "tau":
            labels = _classify.classify_tau(bands["tau_gd"], valid)
        elif scheme == "alpha":
            labels = _classify.classify_alpha(bands["alpha_gd"], valid)
        elif scheme == "pgd-alpha":
            labels = _classify.classify_pgd_alpha(bands["p_gd"], bands["alpha_gd"], valid)
        else:
            raise ValueError(f"unknown classification scheme {scheme!r}")
        out.bands["class_map"] = labels
        return out

    # job == "spff"
    theta_deg, cols, col_norms, tflat, tnorms = _grid_tables(
        cfg.theta_grid_step, cfg.target_set
    )
    inv_col_norms = 1.0 / col_norms
    target_units = tflat / tnorms[:, None]
    group_code = np.array(
        [_GROUP_CODE[_GROUP_OF_TARGET[t]] for t in cfg.target_set], dtype=np.uint8
    )
    kern = get_backend()
    lo, hi = cfg.alpha_volume_range

    power_names = [f"P_{t.value}" for t in cfg.target_set]
    float_names = power_names + ["P_volume", "P_residue", "theta_ms", "gamma", "span"]
    fbands = {name: np.full((h, w), np.nan, dtype=np.float64) for name in float_names}
    bbands = {
        name: np.zeros((h, w), dtype=np.uint8)
        for name in ("branch", "best_target", "dominant", "gamma_flag")
    }

    def tile_spff(edge):
        r0, r1 = edge
        t3rows = t3[r0:r1].reshape(-1, 3, 3)
        kflat, c11, c33 = _prepare_rows(t3rows)
        vrows = valid[r0:r1].ravel()
        powers, p_rv, p_res, theta, best, branch, dom, gamma, gflag = kern.factorize_block(
            kflat, c11, c33, vrows, cols, inv_col_norms, theta_deg,
            target_units, _TRI_UNIT, group_code, lo, hi,
            cfg.include_volume, cfg.branch_swapped,
        )
        rows = r1 - r0
        for j, name in enumerate(power_names):
            fbands[name][r0:r1] = powers[:, j].reshape(rows, w)
        fbands["P_volume"][r0:r1] = p_rv.reshape(rows, w)
        fbands["P_residue"][r0:r1] = p_res.reshape(rows, w)
        fbands["theta_ms"][r0:r1] = theta.reshape(rows, w)
        fbands["gamma"][r0:r1] = gamma.reshape(rows, w)
        fbands["span"][r0:r1] = (2.0 * kflat[:, 0]).reshape(rows, w)
        bbands["branch"][r0:r1] = branch.reshape(rows, w)
        bbands["best_target"][r0:r1] = best.reshape(rows, w)
        bbands["dominant"][r0:r1] = dom.reshape(rows, w)
        bbands["gamma_flag"][r0:r1] = gflag.reshape(rows, w)

    _run_tiles(h, tile_rows, workers, tile_spff)
    fbands["span"][~valid] = np.nan
    out.bands.update(fbands)
    out.bands.update(bbands)
    return out


def rgb_from_powers(stack: RasterStack) -> RasterStack:
    """Group spff power bands into red/green/blue/helix composite planes."""
    needed = ("P_volume", "P_residue")
    for name in needed:
        if name not in stack.bands:
            raise ValueError("rgb job needs the band set produced by the spff job")
    h, w = stack.height, stack.width
    groups = {
        "red": np.zeros((h, w), dtype=np.float64),
        "green": stack.bands["P_volume"] + stack.bands["P_residue"],
        "blue": np.zeros((h, w), dtype=np.float64),
        "hlx": np.zeros((h, w), dtype=np.float64),
    }
    code_to_band = {1: "blue", 3: "red", 4: "hlx"}
    for name, arr in stack.bands.items():
        if not name.startswith("P_") or name in ("P_volume", "P_residue"):
            continue
        tgt = ElementaryTarget(name[2:])
        band = code_to_band[_GROUP_CODE[_GROUP_OF_TARGET[tgt]]]
        groups[band] = groups[band] + arr
    out = RasterStack(width=w, height=h, mask=stack.mask.copy())
    out.meta = dict(stack.meta)
    out.bands.update(groups)
    return out
