"""Core polarimetric matrix algebra.

Conventions used throughout the package:

* scattering matrices are monostatic/reciprocal (s_hv == s_vh), stored as the
  three complex channels (s_hh, s_hv, s_vv);
* coherency matrices T are 3x3 Hermitian in the Pauli basis
  (1/sqrt(2)) * [s_hh + s_vv, s_hh - s_vv, 2*s_hv];
* covariance matrices C are 3x3 Hermitian in the lexicographic basis
  [s_hh, sqrt(2)*s_hv, s_vv];
* Kennaugh matrices K are 4x4 real, with span(K) == 2*K[0,0].

Angles passed to :func:`rotate_kennaugh` are in radians; user-facing angle
parameters elsewhere in the package are in degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ElementaryTarget",
    "ScatteringMatrix",
    "COHERENT_TARGETS",
    "as_coherency",
    "as_covariance",
    "as_kennaugh",
    "elementary_target",
    "kennaugh_from_scattering",
    "kennaugh_from_coherency",
    "coherency_from_kennaugh",
    "coherency_from_covariance",
    "covariance_from_coherency",
    "rotate_kennaugh",
    "grvm_kennaugh",
    "span",
    "fry_kattawar_residual",
]

# Relative tolerance (against the trace) for accepting a matrix as Hermitian,
# and the relative floor for negative diagonal round-off.
HERMITIAN_RTOL = 1e-9
DIAG_RTOL = 1e-12

# Expansion matrix mapping lexicographic kron products onto the Kennaugh form.
_A = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
    ],
    dtype=np.complex128,
)

# Lexicographic -> Pauli basis change, unitary.
_SQ2 = np.sqrt(2.0)
_U3 = np.array(
    [
        [1, 0, 1],
        [1, 0, -1],
        [0, _SQ2, 0],
    ],
    dtype=np.complex128,
) / _SQ2


class ElementaryTarget(Enum):
    """Closed set of canonical single targets with a fixed Kennaugh model each."""

    TRIHEDRAL = "trihedral"
    DIHEDRAL = "dihedral"
    DIPOLE = "dipole"
    CYLINDER = "cylinder"
    NARROW_DIHEDRAL = "narrow_dihedral"
    QUARTER_WAVE_PLUS = "quarter_wave_plus"
    QUARTER_WAVE_MINUS = "quarter_wave_minus"
    LEFT_HELIX = "left_helix"
    RIGHT_HELIX = "right_helix"
    IDEAL_DEPOLARIZER = "ideal_depolarizer"


def _k(rows) -> np.ndarray:
    m = np.array(rows, dtype=np.float64)
    m.setflags(write=False)
    return m


# Kennaugh models, entries kept as exact rationals.
_TARGET_KENNAUGH: dict[ElementaryTarget, np.ndarray] = {
    ElementaryTarget.TRIHEDRAL: _k(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]
    ),
    ElementaryTarget.DIHEDRAL: _k(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]
    ),
    ElementaryTarget.DIPOLE: _k(
        [
            [1 / 2, 1 / 2, 0, 0],
            [1 / 2, 1 / 2, 0, 0],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
        ]
    ),
    ElementaryTarget.CYLINDER: _k(
        [
            [5 / 8, 3 / 8, 0, 0],
            [3 / 8, 5 / 8, 0, 0],
            [0, 0, 1 / 2, 0],
            [0, 0, 0, -1 / 2],
        ]
    ),
    ElementaryTarget.NARROW_DIHEDRAL: _k(
        [
            [5 / 8, 3 / 8, 0, 0],
            [3 / 8, 5 / 8, 0, 0],
            [0, 0, -1 / 2, 0],
            [0, 0, 0, 1 / 2],
        ]
    ),
    ElementaryTarget.QUARTER_WAVE_PLUS: _k(
        [
            [1 / 2, 0, 0, 0],
            [0, 1 / 2, 0, 0],
            [0, 0, 0, 1 / 2],
            [0, 0, 1 / 2, 0],
        ]
    ),
    ElementaryTarget.QUARTER_WAVE_MINUS: _k(
        [
            [1 / 2, 0, 0, 0],
            [0, 1 / 2, 0, 0],
            [0, 0, 0, -1 / 2],
            [0, 0, -1 / 2, 0],
        ]
    ),
    ElementaryTarget.LEFT_HELIX: _k(
        [[1, 0, 0, -1], [0, 0, 0, 0], [0, 0, 0, 0], [-1, 0, 0, 1]]
    ),
    ElementaryTarget.RIGHT_HELIX: _k(
        [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]]
    ),
    ElementaryTarget.IDEAL_DEPOLARIZER: _k(
        [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    ),
}

#: Every elementary target except the ideal depolarizer.
COHERENT_TARGETS: tuple[ElementaryTarget, ...] = tuple(
    t for t in ElementaryTarget if t is not ElementaryTarget.IDEAL_DEPOLARIZER
)


@dataclass(frozen=True)
class ScatteringMatrix:
    """Reciprocal single-look scattering matrix, channel order (hh, hv, vv)."""

    s_hh: complex
    s_hv: complex
    s_vv: complex

    def __post_init__(self):
        for name in ("s_hh", "s_hv", "s_vv"):
            v = complex(getattr(self, name))
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError(f"non-finite scattering channel {name}")

    def as_matrix(self) -> np.ndarray:
        return np.array(
            [[self.s_hh, self.s_hv], [self.s_hv, self.s_vv]], dtype=np.complex128
        )

    def pauli_vector(self) -> np.ndarray:
        return np.array(
            [self.s_hh + self.s_vv, self.s_hh - self.s_vv, 2 * self.s_hv],
            dtype=np.complex128,
        ) / _SQ2


def _as_hermitian(m, size: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.shape != (size, size):
        raise ValueError(f"{what} must be {size}x{size}, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"non-finite entries in {what}")
    tr = float(np.trace(a).real)
    scale = max(abs(tr), float(np.abs(a).max()), np.finfo(np.float64).tiny)
    defect = float(np.abs(a - a.conj().T).max())
    if defect > HERMITIAN_RTOL * scale:
        raise ValueError(
            f"{what} is not Hermitian within tolerance "
            f"(defect {defect:.3e} vs {HERMITIAN_RTOL * scale:.3e})"
        )
    a = (a + a.conj().T) / 2
    if tr > 0 and float(a.diagonal().real.min()) < -DIAG_RTOL * tr:
        raise ValueError(f"significantly negative diagonal in {what}")
    return a


def as_coherency(t) -> np.ndarray:
    """Validate and symmetrize a 3x3 Hermitian coherency matrix."""
    return _as_hermitian(t, 3, "coherency matrix")


def as_covariance(c) -> np.ndarray:
    """Validate and symmetrize a 3x3 Hermitian covariance matrix."""
    return _as_hermitian(c, 3, "covariance matrix")


def as_kennaugh(k) -> np.ndarray:
    """Validate a 4x4 real Kennaugh matrix (finite entries, no symmetry demanded)."""
    a = np.asarray(k, dtype=np.float64)
    if a.shape != (4, 4):
        raise ValueError(f"Kennaugh matrix must be 4x4, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries in Kennaugh matrix")
    return a


def elementary_target(target: ElementaryTarget) -> np.ndarray:
    """Return a writable copy of the Kennaugh model for ``target``."""
    if not isinstance(target, ElementaryTarget):
        raise ValueError(f"unknown elementary target: {target!r}")
    return _TARGET_KENNAUGH[target].copy()


def kennaugh_from_scattering(s: ScatteringMatrix) -> np.ndarray:
    """Kennaugh matrix of a coherent scatterer, K = (1/2) A* (S kron S*) A*^T."""
    sm = s.as_matrix()
    w = np.kron(sm, sm.conj())
    ac = _A.conj()
    k = 0.5 * (ac @ w @ ac.T)
    k = k.real
    # exact for reciprocal S up to round-off; enforce the symmetry
    return (k + k.T) / 2


def kennaugh_from_coherency(t) -> np.ndarray:
    """Kennaugh matrix of an incoherent (speckle-averaged) pixel."""
    t = as_coherency(t)
    t11, t22, t33 = t[0, 0].real, t[1, 1].real, t[2, 2].real
    t12, t13, t23 = t[0, 1], t[0, 2], t[1, 2]
    k = np.empty((4, 4), dtype=np.float64)
    k[0, 0] = (t11 + t22 + t33) / 2
    k[0, 1] = t12.real
    k[0, 2] = t13.real
    k[0, 3] = t23.imag
    k[1, 1] = (t11 + t22 - t33) / 2
    k[1, 2] = t23.real
    k[1, 3] = t13.imag
    k[2, 2] = (t11 - t22 + t33) / 2
    k[2, 3] = -t12.imag
    k[3, 3] = (-t11 + t22 + t33) / 2
    k[1, 0], k[2, 0], k[3, 0] = k[0, 1], k[0, 2], k[0, 3]
    k[2, 1], k[3, 1], k[3, 2] = k[1, 2], k[1, 3], k[2, 3]
    return k


def coherency_from_kennaugh(k) -> np.ndarray:
    """Invert :func:`kennaugh_from_coherency`.

    Only the symmetric part of ``k`` is observable through that map, so the
    input must be a Kennaugh matrix of incoherent form (symmetric); the
    antisymmetric residue of a noisy input is ignored.
    """
    k = as_kennaugh(k)
    k = (k + k.T) / 2
    t = np.empty((3, 3), dtype=np.complex128)
    t[0, 0] = k[0, 0] - k[3, 3]
    t[1, 1] = k[0, 0] - k[2, 2]
    t[2, 2] = k[0, 0] - k[1, 1]
    t[0, 1] = k[0, 1] - 1j * k[2, 3]
    t[0, 2] = k[0, 2] + 1j * k[1, 3]
    t[1, 2] = k[1, 2] + 1j * k[0, 3]
    t[1, 0] = t[0, 1].conjugate()
    t[2, 0] = t[0, 2].conjugate()
    t[2, 1] = t[1, 2].conjugate()
    return t


def coherency_from_covariance(c) -> np.ndarray:
    """Change of basis, lexicographic covariance -> Pauli coherency."""
    c = as_covariance(c)
    t = _U3 @ c @ _U3.conj().T
    return (t + t.conj().T) / 2


def covariance_from_coherency(t) -> np.ndarray:
    """Change of basis, Pauli coherency -> lexicographic covariance."""
    t = as_coherency(t)
    c = _U3.conj().T @ t @ _U3
    return (c + c.conj().T) / 2


def rotate_kennaugh(k, theta: float) -> np.ndarray:
    """Rotate a Kennaugh matrix about the line of sight by ``theta`` radians.

    Leaves K[0,0] (hence the span) exactly unchanged.
    """
    k = as_kennaugh(k)
    c = np.cos(2.0 * theta)
    s = np.sin(2.0 * theta)
    r = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=np.float64,
    )
    return r @ k @ r.T


def grvm_kennaugh(gamma: float) -> np.ndarray:
    """Kennaugh matrix of the generalized random-volume model.

    ``gamma`` is the co-polar power ratio C11/C33 of the volume; the returned
    matrix is normalized so that its distance to the trihedral/dihedral pair is
    balanced. gamma == 1 reduces to the classical uniform random volume
    diag(2, 1, 1, 0).
    """
    g = float(gamma)
    if not np.isfinite(g) or g <= 0.0:
        raise ValueError(f"gamma must be a finite positive ratio, got {gamma!r}")
    rg = np.sqrt(g)
    denom = 3.0 * (1.0 + g) / 4.0 - rg / 6.0
    k = np.zeros((4, 4), dtype=np.float64)
    k[0, 0] = 3.0 / 2.0 * (1.0 + g) - rg / 3.0
    k[0, 1] = g - 1.0
    k[1, 0] = g - 1.0
    k[1, 1] = (1.0 + g) / 2.0 + rg / 3.0
    k[2, 2] = (1.0 + g) / 2.0 + rg / 3.0
    k[3, 3] = (1.0 + g) / 2.0 - rg
    return k / denom


def span(k) -> float:
    """Total scattered power of a Kennaugh pixel, span == 2*K[0,0]."""
    k = as_kennaugh(k)
    return 2.0 * float(k[0, 0])


def fry_kattawar_residual(k) -> float:
    """Coherency test residual 4*K11^2 - sum(K_ij^2).

    Zero (to round-off) for the Kennaugh matrix of a single coherent
    scatterer, strictly positive for depolarizing mixtures.
    """
    k = as_kennaugh(k)
    return 4.0 * float(k[0, 0]) ** 2 - float(np.sum(k * k))
