"""Sequential power factorization of polarimetric pixels.

Per pixel: de-orient the Kennaugh matrix by a grid search over line-of-sight
rotation, measure similarities (1 - GD) to a configurable set of coherent
targets plus a gamma-adapted random-volume model, order the components by
similarity, and split the span into non-negative component powers with a
telescoping product so that powers plus residue always add back to the span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (
    ElementaryTarget,
    as_covariance,
    as_coherency,
    as_kennaugh,
    coherency_from_covariance,
    elementary_target,
    grvm_kennaugh,
    kennaugh_from_coherency,
    rotate_kennaugh,
    span as span_of,
)
from .geodesic import gd_kennaugh
from .params import alpha_gd

__all__ = [
    "SpffConfig",
    "PowerDecomposition",
    "RgbComposite",
    "DEFAULT_TARGET_SET",
    "GAMMA_MIN",
    "GAMMA_MAX",
    "optimize_orientation",
    "gamma_ratio",
    "convex_split",
    "factorize_pixel",
    "rgb_composite",
    "dominant_label",
    "DOMINANT_LABELS",
]

#: Clamping window for the volume co-polar ratio.
GAMMA_MIN = 1e-4
GAMMA_MAX = 1e4
_C33_FLOOR = 1e-30

# Orientation-search scores within this fraction of ||K|| of the maximum are
# treated as tied and resolved to the earliest grid column (smallest |theta|).
# Rotation-invariant targets tie across the whole grid up to round-off hair;
# without the band the winning angle would be arbitrary.
_TIE_TOL = 1e-10

#: Coherent targets searched by default, in dominance tie-break order.
DEFAULT_TARGET_SET: tuple[ElementaryTarget, ...] = (
    ElementaryTarget.TRIHEDRAL,
    ElementaryTarget.CYLINDER,
    ElementaryTarget.NARROW_DIHEDRAL,
    ElementaryTarget.DIHEDRAL,
    ElementaryTarget.LEFT_HELIX,
    ElementaryTarget.RIGHT_HELIX,
)

#: Dominant-label byte codes used in raster outputs (0 = no data).
DOMINANT_LABELS: tuple[str, ...] = ("odd", "rand", "even", "hlx")

# Composite grouping of component ids; targets outside the default set are
# lumped with the even-bounce family (their alpha cluster sits closest).
_GROUP_OF_TARGET: dict[ElementaryTarget, str] = {
    ElementaryTarget.TRIHEDRAL: "odd",
    ElementaryTarget.CYLINDER: "odd",
    ElementaryTarget.DIHEDRAL: "even",
    ElementaryTarget.NARROW_DIHEDRAL: "even",
    ElementaryTarget.DIPOLE: "even",
    ElementaryTarget.QUARTER_WAVE_PLUS: "even",
    ElementaryTarget.QUARTER_WAVE_MINUS: "even",
    ElementaryTarget.LEFT_HELIX: "hlx",
    ElementaryTarget.RIGHT_HELIX: "hlx",
}


@dataclass(frozen=True)
class SpffConfig:
    """Factorization settings.

    theta_grid_step is in degrees; the orientation grid is symmetric about 0,
    spans [-22.5, +22.5] inclusive, and always contains 0. Steps that do not
    divide 22.5 are snapped to the nearest exact divisor. alpha_volume_range
    is the half-open [low, high) alpha window (degrees, on the un-rotated
    pixel) that routes a pixel to branch A, where the volume component
    competes at its natural similarity rank; outside the window the volume is
    forced to the end of the dominance order (branch B). branch_swapped
    inverts that routing.
    """

    target_set: tuple[ElementaryTarget, ...] = DEFAULT_TARGET_SET
    theta_grid_step: float = 0.1
    alpha_volume_range: tuple[float, float] = (30.0, 40.0)
    include_volume: bool = True
    branch_swapped: bool = False

    def __post_init__(self):
        targets = tuple(self.target_set)
        if not targets:
            raise ValueError("target_set must not be empty")
        if len(set(targets)) != len(targets):
            raise ValueError("target_set contains duplicates")
        for t in targets:
            if not isinstance(t, ElementaryTarget):
                raise ValueError(f"not an elementary target: {t!r}")
            if t is ElementaryTarget.IDEAL_DEPOLARIZER:
                raise ValueError("the ideal depolarizer cannot be a search target")
        object.__setattr__(self, "target_set", targets)
        step = float(self.theta_grid_step)
        if not np.isfinite(step) or not 0.0 < step <= 22.5:
            raise ValueError("theta_grid_step must lie in (0, 22.5] degrees")
        lo, hi = (float(x) for x in self.alpha_volume_range)
        if not 0.0 <= lo < hi <= 90.0:
            raise ValueError("alpha_volume_range must be an increasing pair in [0, 90]")
        object.__setattr__(self, "alpha_volume_range", (lo, hi))


@dataclass(frozen=True)
class RgbComposite:
    """Grouped powers for rendering (helix power is tracked but not drawn)."""

    red: float
    green: float
    blue: float
    helix: float


@dataclass(frozen=True)
class PowerDecomposition:
    """Result of factorizing one pixel.

    powers holds one non-negative power per searched coherent target;
    volume and residue carry the rest. All powers plus the residue sum to
    the span. theta_ms is in degrees; branch is "A" or "B"; dominance lists
    component ids (target values plus "volume") in splitting order.
    """

    powers: dict[ElementaryTarget, float]
    volume: float
    residue: float
    theta_ms: float
    best_target: ElementaryTarget
    branch: str
    dominance: tuple[str, ...]
    gamma: float
    gamma_clamped: bool
    span: float


def _theta_search_order(step: float) -> np.ndarray:
    """Grid angles in degrees, ordered by (|theta|, theta)."""
    m = int(round(22.5 / step))
    m = max(m, 1)
    eff = 22.5 / m
    ks = np.empty(2 * m + 1, dtype=np.int64)
    ks[0] = 0
    ks[1::2] = -np.arange(1, m + 1)
    ks[2::2] = np.arange(1, m + 1)
    return ks * eff


@lru_cache(maxsize=8)
def _grid_tables(step: float, targets: tuple[ElementaryTarget, ...]):
    """Precomputed search tables shared by the scalar path and the kernels.

    Columns are (grid point major, target minor) so that a first-occurrence
    argmax over the clamped cosines lands on the smallest |theta|, then the
    smallest theta, then the earliest target of any tied optimum.
    """
    theta_deg = _theta_search_order(step)
    tmats = [elementary_target(t) for t in targets]
    ntheta, ntgt = theta_deg.size, len(tmats)
    cols = np.empty((ntheta * ntgt, 16), dtype=np.float64)
    for i, th in enumerate(theta_deg):
        # <R(th) K R(th)^T, T> == <K, R(-th) T R(-th)^T>
        rad = np.deg2rad(-th)
        for j, tm in enumerate(tmats):
            cols[i * ntgt + j] = rotate_kennaugh(tm, rad).ravel()
    col_norms = np.sqrt(np.sum(cols * cols, axis=1))
    tflat = np.array([tm.ravel() for tm in tmats])
    tnorms = np.sqrt(np.sum(tflat * tflat, axis=1))
    for arr in (theta_deg, cols, col_norms, tflat, tnorms):
        arr.setflags(write=False)
    return theta_deg, cols, col_norms, tflat, tnorms


def optimize_orientation(
    k, config: SpffConfig | None = None
) -> tuple[float, np.ndarray, ElementaryTarget]:
    """De-orient a Kennaugh pixel against the configured coherent targets.

    Returns (theta_ms_deg, k_ms, best_target): the grid angle whose rotation
    brings the pixel closest (smallest GD) to any searched target, the pixel
    rotated by that angle, and the matching target. Ties (within round-off)
    resolve to the smallest |theta|, then the smallest theta, then the
    earliest target in the configured order.
    """
    cfg = config or SpffConfig()
    k = as_kennaugh(k)
    theta_deg, cols, col_norms, _, _ = _grid_tables(cfg.theta_grid_step, cfg.target_set)
    kflat = k.ravel()
    nk = float(np.sqrt(np.sum(kflat * kflat)))
    if not np.isfinite(nk) or nk == 0.0:
        raise ValueError("cannot orient a zero or non-finite pixel")
    scores = (cols @ kflat) / col_norms
    best = int(np.argmax(scores >= scores.max() - _TIE_TOL * nk))
    ntgt = len(cfg.target_set)
    theta_ms = float(theta_deg[best // ntgt])
    k_ms = rotate_kennaugh(k, np.deg2rad(theta_ms))
    return theta_ms, k_ms, cfg.target_set[best % ntgt]


def gamma_ratio(c) -> float:
    """Volume co-polar power ratio C11/C33, clamped to [1e-4, 1e4]."""
    c = as_covariance(c)
    g, _ = _gamma_with_flag(float(c[0, 0].real), float(c[2, 2].real))
    return g


def _gamma_with_flag(c11: float, c33: float) -> tuple[float, bool]:
    if c33 <= _C33_FLOOR:
        return GAMMA_MAX, True
    g = c11 / c33
    if g < GAMMA_MIN:
        return GAMMA_MIN, True
    if g > GAMMA_MAX:
        return GAMMA_MAX, True
    return g, False


def convex_split(similarities) -> tuple[np.ndarray, float]:
    """Split unity over ordered similarities by a telescoping product.

    w_i = x_i * prod_{j<i} (1 - x_j); the returned residue is the full
    product prod_j (1 - x_j). Weights and residue are non-negative and sum
    to 1 by construction. Inputs must lie in [0, 1].
    """
    x = np.asarray(similarities, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("similarities must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("similarities must lie in [0, 1]")
    w = np.empty_like(x)
    r = 1.0
    for i, xi in enumerate(x):
        w[i] = xi * r
        r *= 1.0 - xi
    return w, float(r)


def _consistent(t: np.ndarray, c: np.ndarray) -> bool:
    tc = coherency_from_covariance(c)
    scale = max(float(np.abs(t).max()), float(np.abs(tc).max()), _C33_FLOOR)
    return float(np.abs(tc - t).max()) <= 1e-6 * scale


def factorize_pixel(t, c, config: SpffConfig | None = None) -> PowerDecomposition:
    """Factorize one pixel given its coherency and covariance matrices.

    The two inputs must describe the same pixel (they are checked against
    each other); the covariance supplies the volume ratio gamma, the
    coherency everything else.
    """
    cfg = config or SpffConfig()
    t = as_coherency(t)
    c = as_covariance(c)
    if not _consistent(t, c):
        raise ValueError("coherency and covariance inputs disagree")
    k = kennaugh_from_coherency(t)
    sp = span_of(k)
    if sp <= 0.0:
        raise ValueError("pixel has non-positive span")

    alpha = alpha_gd(k)
    gamma, gflag = _gamma_with_flag(float(c[0, 0].real), float(c[2, 2].real))
    theta_ms, k_ms, best = optimize_orientation(k, cfg)

    sims = [
        (tgt.value, 1.0 - gd_kennaugh(k_ms, elementary_target(tgt)))
        for tgt in cfg.target_set
    ]
    if cfg.include_volume:
        sims.append(("volume", 1.0 - gd_kennaugh(k_ms, grvm_kennaugh(gamma))))

    lo, hi = cfg.alpha_volume_range
    in_window = lo <= alpha < hi
    branch_a = in_window != cfg.branch_swapped
    if branch_a or not cfg.include_volume:
        ordered = sorted(sims, key=lambda item: -item[1])
    else:
        ordered = sorted(sims[:-1], key=lambda item: -item[1]) + [sims[-1]]

    weights, residue = convex_split([s for _, s in ordered])
    power_of = {name: sp * w for (name, _), w in zip(ordered, weights)}
    return PowerDecomposition(
        powers={tgt: power_of[tgt.value] for tgt in cfg.target_set},
        volume=power_of.get("volume", 0.0),
        residue=sp * residue,
        theta_ms=theta_ms,
        best_target=best,
        branch="A" if branch_a else "B",
        dominance=tuple(name for name, _ in ordered),
        gamma=gamma,
        gamma_clamped=gflag,
        span=sp,
    )


def _grouped(d: PowerDecomposition) -> dict[str, float]:
    groups = {"odd": 0.0, "rand": d.volume + d.residue, "even": 0.0, "hlx": 0.0}
    for tgt, p in d.powers.items():
        groups[_GROUP_OF_TARGET[tgt]] += p
    return groups


def rgb_composite(d: PowerDecomposition) -> RgbComposite:
    """Group powers for rendering: even->red, volume+residue->green, odd->blue."""
    g = _grouped(d)
    return RgbComposite(red=g["even"], green=g["rand"], blue=g["odd"], helix=g["hlx"])


def dominant_label(d: PowerDecomposition) -> str | None:
    """Name of the strongest power group, None for an all-zero pixel.

    Ties resolve in the fixed order odd, rand, even, hlx.
    """
    g = _grouped(d)
    if all(v == 0.0 for v in g.values()):
        return None
    return max(DOMINANT_LABELS, key=lambda name: (g[name], -DOMINANT_LABELS.index(name)))
