"""Unsupervised classification rules on the geodesic parameter planes.

Three schemes share the label conventions used by the raster pipeline:
label 0 is always "no data"; class labels start at 1. Inputs are in degrees
for angles and [0, 1] for purity.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .params import alpha_gd, purity_gd

__all__ = [
    "AlphaZone",
    "tau_segment",
    "alpha_zone",
    "pgd_alpha_class",
    "feasible_boundary",
    "boundary_kennaugh",
    "boundary_table",
    "classify_tau",
    "classify_alpha",
    "classify_pgd_alpha",
    "CLASS_PALETTES",
    "legend_lines",
]

#: Helicity threshold separating sea from terrain, degrees.
TAU_SPLIT_DEG = 5.0


class AlphaZone(Enum):
    ODD_BOUNCE = "odd_bounce"
    VOLUME = "volume"
    EVEN_OR_HELIX = "even_or_helix"


def tau_segment(tau: float) -> str:
    """Binary sea/terrain call from the helicity angle.

    tau below 5 deg reads as sea surface, 5 deg and above as terrain.
    """
    t = float(tau)
    if not np.isfinite(t) or t < 0.0 or t > 45.0:
        raise ValueError(f"tau must lie in [0, 45] degrees, got {tau!r}")
    return "sea" if t < TAU_SPLIT_DEG else "terrain"


def alpha_zone(alpha: float) -> AlphaZone:
    """Coarse scattering-type zone from the alpha angle."""
    a = float(alpha)
    if not np.isfinite(a) or a < 0.0 or a > 90.0:
        raise ValueError(f"alpha must lie in [0, 90] degrees, got {alpha!r}")
    if a < 30.0:
        return AlphaZone.ODD_BOUNCE
    if a < 40.0:
        return AlphaZone.VOLUME
    return AlphaZone.EVEN_OR_HELIX


def pgd_alpha_class(purity: float, alpha: float) -> int:
    """Eight-class partition of the purity/alpha plane.

    Four alpha segments ([0,30), [30,40), [40,80), [80,90]) times two purity
    halves; odd classes collect the depolarized half (purity <= 0.5), even
    classes the pure half.
    """
    p = float(purity)
    a = float(alpha)
    if not np.isfinite(p) or p < 0.0 or p > 1.0:
        raise ValueError(f"purity must lie in [0, 1], got {purity!r}")
    if not np.isfinite(a) or a < 0.0 or a > 90.0:
        raise ValueError(f"alpha must lie in [0, 90] degrees, got {alpha!r}")
    if a < 30.0:
        base = 1
    elif a < 40.0:
        base = 3
    elif a < 80.0:
        base = 5
    else:
        base = 7
    return base + (1 if p > 0.5 else 0)


def boundary_kennaugh(curve: str, m: float) -> np.ndarray:
    """Kennaugh matrix of a point on a feasible-region boundary curve.

    The three curves trace the physical rim of the purity/alpha plane as a
    mixture parameter m runs over its range: curve I (m in [0,1]) from the
    fully random pixel to the most depolarized edge of the odd-bounce side,
    curve II (m in [0, 0.5]) and curve III (m in [0.5, 1]) along the
    even-bounce side.
    """
    m = float(m)
    if curve == "I":
        if not 0.0 <= m <= 1.0:
            raise ValueError("curve I takes m in [0, 1]")
        d = np.array([(2 * m + 1) / 2, 1 / 2, 1 / 2, (2 * m - 1) / 2])
    elif curve == "II":
        if not 0.0 <= m <= 0.5:
            raise ValueError("curve II takes m in [0, 0.5]")
        d = np.array([(2 * m + 1) / 2, (1 - 2 * m) / 2, (2 * m - 1) / 2, (2 * m + 1) / 2])
    elif curve == "III":
        if not 0.5 <= m <= 1.0:
            raise ValueError("curve III takes m in [0.5, 1]")
        d = np.array([(2 * m + 1) / 2, (2 * m - 1) / 2, (2 * m - 1) / 2, (3 - 2 * m) / 2])
    else:
        raise ValueError(f"unknown boundary curve {curve!r}, expected I, II or III")
    return np.diag(d)


def feasible_boundary(curve: str, m: float) -> tuple[float, float]:
    """(purity, alpha_deg) of a boundary-curve point."""
    k = boundary_kennaugh(curve, m)
    return purity_gd(k), alpha_gd(k)


def boundary_table(dm: float = 0.001) -> list[tuple[str, float, float, float]]:
    """Sample all three boundary curves at spacing ``dm``.

    Returns rows (curve, m, purity, alpha_deg), each curve sampled inclusive
    of both endpoints.
    """
    if not 0.0 < dm <= 0.5:
        raise ValueError("dm must lie in (0, 0.5]")
    rows: list[tuple[str, float, float, float]] = []
    for curve, lo, hi in (("I", 0.0, 1.0), ("II", 0.0, 0.5), ("III", 0.5, 1.0)):
        n = int(round((hi - lo) / dm))
        ms = lo + (hi - lo) * np.arange(n + 1) / max(n, 1)
        for m in ms:
            p, a = feasible_boundary(curve, float(m))
            rows.append((curve, float(m), p, a))
    return rows


# ---------------------------------------------------------------------------
# vectorized raster labelling (label 0 = no data)

def classify_tau(tau: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Label raster: 1 = sea (tau < 5 deg), 2 = terrain."""
    labels = np.where(tau < TAU_SPLIT_DEG, 1, 2).astype(np.uint8)
    labels[~valid] = 0
    return labels


def classify_alpha(alpha: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Label raster: 1 = odd bounce, 2 = volume, 3 = even bounce or helix."""
    labels = np.full(alpha.shape, 3, dtype=np.uint8)
    labels[alpha < 40.0] = 2
    labels[alpha < 30.0] = 1
    labels[~valid] = 0
    return labels


def classify_pgd_alpha(purity: np.ndarray, alpha: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Label raster with the eight-class purity/alpha partition."""
    base = np.full(alpha.shape, 7, dtype=np.uint8)
    base[alpha < 80.0] = 5
    base[alpha < 40.0] = 3
    base[alpha < 30.0] = 1
    labels = (base + (purity > 0.5)).astype(np.uint8)
    labels[~valid] = 0
    return labels


# Fixed render palettes, one colour per label (0 is always black).
_PALETTE_TAU = {0: "#000000", 1: "#1b4f9c", 2: "#8c6d3f"}
_PALETTE_ALPHA = {0: "#000000", 1: "#2066ac", 2: "#3d9140", 3: "#c23b3b"}
_PALETTE_PGD_ALPHA = {
    0: "#000000",
    1: "#27418f",
    2: "#7fb2e5",
    3: "#2f7d32",
    4: "#93c572",
    5: "#c4622d",
    6: "#e8a33d",
    7: "#8e44ad",
    8: "#e05563",
}

CLASS_PALETTES: dict[str, dict[int, str]] = {
    "tau": _PALETTE_TAU,
    "alpha": _PALETTE_ALPHA,
    "pgd-alpha": _PALETTE_PGD_ALPHA,
}

_CLASS_NAMES: dict[str, dict[int, str]] = {
    "tau": {0: "nodata", 1: "sea", 2: "terrain"},
    "alpha": {0: "nodata", 1: "odd_bounce", 2: "volume", 3: "even_or_helix"},
    "pgd-alpha": {
        0: "nodata",
        1: "odd_depolarized",
        2: "odd_pure",
        3: "volume_depolarized",
        4: "volume_pure",
        5: "mid_depolarized",
        6: "mid_pure",
        7: "even_depolarized",
        8: "even_pure",
    },
}


def legend_lines(scheme: str) -> list[str]:
    """Text legend for a scheme: one ``label name colour`` line per class."""
    try:
        names = _CLASS_NAMES[scheme]
        palette = CLASS_PALETTES[scheme]
    except KeyError:
        raise ValueError(f"unknown classification scheme {scheme!r}") from None
    return [f"{label} {names[label]} {palette[label]}" for label in sorted(names)]
