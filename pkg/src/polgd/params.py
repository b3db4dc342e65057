"""Roll-invariant scattering parameters derived from geodesic distances.

All angles returned in degrees. Every parameter here depends on the pixel
only through distances to fixed reference targets whose Kennaugh models
commute with line-of-sight rotation structure, so rotating the pixel about
the radar line of sight leaves the values unchanged (to round-off).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ElementaryTarget,
    as_kennaugh,
    elementary_target,
    kennaugh_from_coherency,
    span as span_of,
)
from .geodesic import gd_kennaugh

__all__ = [
    "alpha_gd",
    "tau_gd",
    "purity_gd",
    "depolarization_index",
    "RollInvariantParams",
    "params_for_pixel",
]

_K_TRIHEDRAL = elementary_target(ElementaryTarget.TRIHEDRAL)
_K_LEFT_HELIX = elementary_target(ElementaryTarget.LEFT_HELIX)
_K_RIGHT_HELIX = elementary_target(ElementaryTarget.RIGHT_HELIX)
_K_DEPOLARIZER = elementary_target(ElementaryTarget.IDEAL_DEPOLARIZER)


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def alpha_gd(k) -> float:
    """Scattering-type angle in degrees, 0 (odd bounce) .. 90 (even bounce).

    90 deg times the distance to the trihedral model.
    """
    return _clamp(90.0 * gd_kennaugh(k, _K_TRIHEDRAL), 0.0, 90.0)


def tau_gd(k) -> float:
    """Helicity angle in degrees, 0 (symmetric) .. 45 (pure helix).

    45 deg times one minus the geometric mean of the distances to the two
    helix models; either exact helix pins the value at 45.
    """
    d_lh = gd_kennaugh(k, _K_LEFT_HELIX)
    d_rh = gd_kennaugh(k, _K_RIGHT_HELIX)
    return _clamp(45.0 * (1.0 - np.sqrt(d_lh * d_rh)), 0.0, 45.0)


def purity_gd(k) -> float:
    """Scattering purity in [0, 1] from the distance to the ideal depolarizer.

    The distance of any physical pixel to the ideal depolarizer lies in
    [0, 2/3]; rescaled and squared so a coherent pixel gives 1 and the
    depolarizer itself gives 0. Round-off past the physical bound is clamped.
    """
    k = as_kennaugh(k)
    if k[0, 0] <= 0.0:
        raise ValueError("purity requires a pixel with positive total power")
    p = (1.5 * gd_kennaugh(k, _K_DEPOLARIZER)) ** 2
    return _clamp(p, 0.0, 1.0)


def depolarization_index(k) -> float:
    """Classical depolarization index in [0, 1] (1 for coherent pixels)."""
    k = as_kennaugh(k)
    k11 = float(k[0, 0])
    if k11 <= 0.0:
        raise ValueError("depolarization index requires positive total power")
    num = float(np.sum(k * k)) - k11 * k11
    return _clamp(float(np.sqrt(max(num, 0.0) / (3.0 * k11 * k11))), 0.0, 1.0)


@dataclass(frozen=True)
class RollInvariantParams:
    """Per-pixel roll-invariant parameter set (angles in degrees)."""

    alpha: float
    tau: float
    purity: float
    depolarization: float
    span: float


def params_for_pixel(t) -> RollInvariantParams:
    """All roll-invariant parameters of one coherency pixel.

    Requires a valid pixel (Hermitian T with positive trace).
    """
    k = kennaugh_from_coherency(t)
    if k[0, 0] <= 0.0:
        raise ValueError("pixel has non-positive total power")
    return RollInvariantParams(
        alpha=alpha_gd(k),
        tau=tau_gd(k),
        purity=purity_gd(k),
        depolarization=depolarization_index(k),
        span=span_of(k),
    )
