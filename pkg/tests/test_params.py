import math

import numpy as np
import pytest

from polgd.algebra import (
    COHERENT_TARGETS,
    ElementaryTarget,
    elementary_target,
    grvm_kennaugh,
    kennaugh_from_coherency,
    rotate_kennaugh,
)
from polgd.params import (
    alpha_gd,
    depolarization_index,
    params_for_pixel,
    purity_gd,
    tau_gd,
)

from conftest import random_hermitian_psd, random_kennaugh

# Reference angles recomputed from exact rational cosines of the target
# geometry (inner products and norms of the model matrices reduce to small
# fractions), evaluated through math.acos: an independent path from the
# half-angle form used by the implementation.
#   alpha = deg(acos(cos_t)),  tau = 45*(1 - sqrt(d_lh*d_rh)),
#   d = deg(acos(cos))/90.
# Columns: cosine to trihedral, cosine to left helix, cosine to right helix.
_TARGET_COSINES = {
    ElementaryTarget.RIGHT_HELIX: (0.0, 0.0, 1.0),
    ElementaryTarget.LEFT_HELIX: (0.0, 1.0, 0.0),
    ElementaryTarget.DIHEDRAL: (0.0, 1 / 2, 1 / 2),
    ElementaryTarget.NARROW_DIHEDRAL: (1 / 10, 9 / 20, 9 / 20),
    ElementaryTarget.QUARTER_WAVE_PLUS: (1 / 2, 1 / 4, 1 / 4),
    ElementaryTarget.QUARTER_WAVE_MINUS: (1 / 2, 1 / 4, 1 / 4),
    ElementaryTarget.DIPOLE: (1 / 2, 1 / 4, 1 / 4),
    ElementaryTarget.CYLINDER: (9 / 10, 1 / 20, 1 / 20),
    ElementaryTarget.TRIHEDRAL: (1.0, 0.0, 0.0),
}

# Published two-decimal values for the same table.
_TABLE_ANGLES = {
    ElementaryTarget.RIGHT_HELIX: (90.0, 45.0),
    ElementaryTarget.LEFT_HELIX: (90.0, 45.0),
    ElementaryTarget.DIHEDRAL: (90.0, 15.0),
    ElementaryTarget.NARROW_DIHEDRAL: (84.26, 13.37),
    ElementaryTarget.QUARTER_WAVE_PLUS: (60.0, 7.24),
    ElementaryTarget.QUARTER_WAVE_MINUS: (60.0, 7.24),
    ElementaryTarget.DIPOLE: (60.0, 7.24),
    ElementaryTarget.CYLINDER: (25.84, 1.43),
    ElementaryTarget.TRIHEDRAL: (0.0, 0.0),
}


def _deg(cos: float) -> float:
    return math.degrees(math.acos(cos))


def oracle_alpha(cos_t: float) -> float:
    return _deg(cos_t)


def oracle_tau(cos_lh: float, cos_rh: float) -> float:
    d_lh = _deg(cos_lh) / 90.0
    d_rh = _deg(cos_rh) / 90.0
    return 45.0 * (1.0 - math.sqrt(d_lh * d_rh))


class TestAngleTable:
    def test_alpha_against_rational_cosine_oracle(self):
        for tgt, (cos_t, _, _) in _TARGET_COSINES.items():
            k = elementary_target(tgt)
            assert abs(alpha_gd(k) - oracle_alpha(cos_t)) <= 1e-10, tgt

    def test_tau_against_rational_cosine_oracle(self):
        for tgt, (_, cos_lh, cos_rh) in _TARGET_COSINES.items():
            k = elementary_target(tgt)
            assert abs(tau_gd(k) - oracle_tau(cos_lh, cos_rh)) <= 1e-10, tgt

    def test_published_two_decimal_values(self):
        for tgt, (alpha_ref, tau_ref) in _TABLE_ANGLES.items():
            k = elementary_target(tgt)
            assert abs(alpha_gd(k) - alpha_ref) <= 0.01, tgt
            assert abs(tau_gd(k) - tau_ref) <= 0.01, tgt

    def test_exact_endpoints(self):
        assert alpha_gd(elementary_target(ElementaryTarget.TRIHEDRAL)) == 0.0
        assert alpha_gd(elementary_target(ElementaryTarget.DIHEDRAL)) == 90.0
        assert tau_gd(elementary_target(ElementaryTarget.LEFT_HELIX)) == 45.0
        assert tau_gd(elementary_target(ElementaryTarget.TRIHEDRAL)) == 0.0


class TestVolumeAlpha:
    # the three canonical volume coherency shapes and the published alphas
    CASES = (
        (np.array([[15, 5, 0], [5, 7, 0], [0, 0, 8]]) / 30.0, 40.40, 225 / 388),
        (np.diag([2.0, 1.0, 1.0]) / 4.0, 35.26, 2 / 3),
        (np.array([[15, -5, 0], [-5, 7, 0], [0, 0, 8]]) / 30.0, 40.40, 225 / 388),
    )

    def test_volume_models(self):
        for t, ref, cos_sq in self.CASES:
            a = alpha_gd(kennaugh_from_coherency(t))
            assert abs(a - ref) <= 0.01
            assert abs(a - _deg(math.sqrt(cos_sq))) <= 1e-10

    def test_uniform_volume_model(self):
        a = alpha_gd(grvm_kennaugh(1.0))
        assert abs(a - 35.26) <= 0.01
        assert abs(a - _deg(math.sqrt(2 / 3))) <= 1e-10


class TestPurity:
    def test_depolarizer_is_zero(self):
        assert purity_gd(elementary_target(ElementaryTarget.IDEAL_DEPOLARIZER)) == 0.0

    def test_coherent_targets_are_pure(self):
        for tgt in COHERENT_TARGETS:
            assert abs(purity_gd(elementary_target(tgt)) - 1.0) <= 1e-9, tgt

    def test_identity_coherency_landmark(self):
        # fully degenerate eigenvalues: the most depolarized physical pixel
        k = kennaugh_from_coherency(np.eye(3))
        assert abs(purity_gd(k) - 0.25) <= 1e-9
        assert abs(alpha_gd(k) - _deg(1 / math.sqrt(3))) <= 1e-10

    def test_requires_positive_power(self):
        with pytest.raises(ValueError):
            purity_gd(np.diag([0.0, 1.0, 1.0, 1.0]))


class TestDepolarizationIndex:
    def test_trihedral_is_one(self):
        assert depolarization_index(elementary_target(ElementaryTarget.TRIHEDRAL)) == 1.0

    def test_depolarizer_is_zero(self):
        assert depolarization_index(
            elementary_target(ElementaryTarget.IDEAL_DEPOLARIZER)
        ) == 0.0

    def test_identity_coherency_value(self):
        # K = diag(3/2, 1/2, 1/2, 1/2): sum of squares 3, so P_D = 1/3
        k = kennaugh_from_coherency(np.eye(3))
        assert abs(depolarization_index(k) - 1 / 3) <= 1e-12
        assert 0.0 < depolarization_index(k) < 1.0

    def test_requires_positive_power(self):
        with pytest.raises(ValueError):
            depolarization_index(np.zeros((4, 4)))


class TestParamsForPixel:
    def test_pure_trihedral_pixel(self):
        p = params_for_pixel(np.diag([2.0, 0.0, 0.0]))
        assert p.alpha == 0.0
        assert p.tau == 0.0
        assert abs(p.purity - 1.0) <= 1e-9
        assert abs(p.depolarization - 1.0) <= 1e-9
        assert p.span == 2.0

    def test_identity_pixel(self):
        p = params_for_pixel(np.eye(3))
        assert abs(p.alpha - 54.7356) <= 1e-3
        assert abs(p.purity - 0.25) <= 1e-9
        assert p.span == 3.0

    def test_continuity_under_tiny_perturbation(self):
        rng = np.random.default_rng(51)
        clean = params_for_pixel(np.diag([2.0, 0.0, 0.0]))
        noise = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        noise = (noise + noise.conj().T) * 5e-11
        np.fill_diagonal(noise, np.abs(noise.diagonal()))  # keep the pixel valid
        noisy = params_for_pixel(np.diag([2.0, 0.0, 0.0]) + noise)
        assert abs(noisy.alpha - clean.alpha) <= 1e-6
        assert abs(noisy.tau - clean.tau) <= 1e-6
        assert abs(noisy.purity - clean.purity) <= 1e-6
        assert abs(noisy.depolarization - clean.depolarization) <= 1e-6

    def test_rejects_zero_power(self):
        with pytest.raises(ValueError):
            params_for_pixel(np.zeros((3, 3)))


class TestInvariances:
    def test_roll_invariance(self):
        rng = np.random.default_rng(52)
        worst = 0.0
        for _ in range(20):
            k = random_kennaugh(rng)
            base = (alpha_gd(k), tau_gd(k), purity_gd(k), depolarization_index(k))
            for theta in np.linspace(-np.pi / 4, np.pi / 4, 16):
                kr = rotate_kennaugh(k, theta)
                vals = (alpha_gd(kr), tau_gd(kr), purity_gd(kr),
                        depolarization_index(kr))
                worst = max(worst, max(abs(a - b) for a, b in zip(vals, base)))
        assert worst < 1e-10

    def test_scale_invariance(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            k = random_kennaugh(rng)
            lam = rng.uniform(0.01, 100.0)
            assert abs(alpha_gd(lam * k) - alpha_gd(k)) <= 1e-10
            assert abs(tau_gd(lam * k) - tau_gd(k)) <= 1e-10
            assert abs(purity_gd(lam * k) - purity_gd(k)) <= 1e-10
            assert abs(
                depolarization_index(lam * k) - depolarization_index(k)
            ) <= 1e-10

    def test_ranges_always_respected(self):
        rng = np.random.default_rng(54)
        for _ in range(200):
            t = random_hermitian_psd(rng, scale=rng.uniform(0.01, 10.0))
            p = params_for_pixel(t)
            assert 0.0 <= p.alpha <= 90.0
            assert 0.0 <= p.tau <= 45.0
            assert 0.0 <= p.purity <= 1.0
            assert 0.0 <= p.depolarization <= 1.0
            assert p.span > 0.0
