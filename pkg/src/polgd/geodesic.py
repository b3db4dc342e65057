"""Geodesic distance between scattering representations.

Matrices are treated as points on the unit sphere of their flattened
(real-embedded) vector space; the distance is the great-circle angle between
them scaled so that identical shapes give 0 and orthogonal shapes give 1.
The angle is evaluated with the numerically stable half-angle form

    theta = 2 * atan2(||u - v||, ||u + v||),   u, v unit vectors,

which is exact near 0 and pi where the arccos of the inner product loses
half of the available precision. The distance is invariant under positive
rescaling of either argument and under conjugation by a rotation, and the
four representation-specific entry points agree with each other because the
underlying embeddings are isometric.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    ScatteringMatrix,
    as_kennaugh,
    elementary_target,
    ElementaryTarget,
)

__all__ = [
    "gd_kennaugh",
    "gd_coherency",
    "gd_covariance",
    "gd_scattering",
    "similarity",
]

_TWO_OVER_PI = 2.0 / np.pi


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.sqrt(np.sum(v * v)))
    if not np.isfinite(n):
        raise ValueError(f"non-finite entries in {what}")
    if n == 0.0:
        raise ValueError(f"zero-norm {what} has no direction")
    return v / n


def _gd_flat(u: np.ndarray, v: np.ndarray, what: str) -> float:
    u = _unit(u, what)
    v = _unit(v, what)
    num = float(np.sqrt(np.sum((u - v) ** 2)))
    den = float(np.sqrt(np.sum((u + v) ** 2)))
    gd = 2.0 * _TWO_OVER_PI * np.arctan2(num, den)
    # the angle itself covers [0, pi]; anything past the orthogonal point is
    # clamped so non-physical inputs cannot push the distance above 1
    return min(float(gd), 1.0)


def _embed_complex(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def gd_kennaugh(k1, k2) -> float:
    """Geodesic distance between two Kennaugh matrices, in [0, 1]."""
    k1 = as_kennaugh(k1)
    k2 = as_kennaugh(k2)
    return _gd_flat(k1.ravel(), k2.ravel(), "Kennaugh matrix")


def gd_coherency(t1, t2) -> float:
    """Geodesic distance between two coherency matrices.

    Equals :func:`gd_kennaugh` of the converted pair to working precision.
    """
    u = _embed_complex(np.asarray(t1))
    v = _embed_complex(np.asarray(t2))
    if u.shape != (18,) or v.shape != (18,):
        raise ValueError("coherency matrices must be 3x3")
    return _gd_flat(u, v, "coherency matrix")


def gd_covariance(c1, c2) -> float:
    """Geodesic distance between two covariance matrices.

    The lexicographic -> Pauli basis change is unitary, so this equals
    :func:`gd_coherency` of the converted pair to working precision.
    """
    u = _embed_complex(np.asarray(c1))
    v = _embed_complex(np.asarray(c2))
    if u.shape != (18,) or v.shape != (18,):
        raise ValueError("covariance matrices must be 3x3")
    return _gd_flat(u, v, "covariance matrix")


def gd_scattering(s1: ScatteringMatrix, s2: ScatteringMatrix) -> float:
    """Geodesic distance between two single-look scattering matrices.

    Works on the S kron S* outer form, which maps to the coherent Kennaugh
    matrix by a fixed orthogonal-up-to-scale expansion; absolute phase and
    amplitude of either argument drop out.
    """
    m1 = s1.as_matrix()
    m2 = s2.as_matrix()
    u = _embed_complex(np.kron(m1, m1.conj()))
    v = _embed_complex(np.kron(m2, m2.conj()))
    return _gd_flat(u, v, "scattering matrix")


def similarity(k, reference) -> float:
    """Similarity 1 - GD between a Kennaugh pixel and a reference.

    ``reference`` may be a Kennaugh matrix or an :class:`ElementaryTarget`.
    """
    if isinstance(reference, ElementaryTarget):
        reference = elementary_target(reference)
    return 1.0 - gd_kennaugh(k, reference)
