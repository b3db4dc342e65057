import numpy as np
import pytest

import polgd
from polgd.algebra import ElementaryTarget, covariance_from_coherency
from polgd.backend import available_backends, backend_name, set_backend
from polgd.params import params_for_pixel
from polgd.pipeline import PIPELINE_JOBS, rgb_from_powers, run_pipeline
from polgd.raster import RasterStack
from polgd.spff import SpffConfig, dominant_label, factorize_pixel, rgb_composite
from polgd.synth import Region, SceneSpec, synth_scene

from conftest import quadrant_scene

DOMINANT_CODE = {"odd": 1, "rand": 2, "even": 3, "hlx": 4}
BRANCH_CODE = {"A": 1, "B": 2}

SPFF_FLOAT_BANDS = (
    "P_trihedral", "P_cylinder", "P_narrow_dihedral", "P_dihedral",
    "P_left_helix", "P_right_helix", "P_volume", "P_residue",
    "theta_ms", "gamma", "span",
)
SPFF_BYTE_BANDS = ("branch", "best_target", "dominant", "gamma_flag")


def trihedral_scene(n=8):
    return synth_scene(SceneSpec(width=n, height=n, regions=(
        Region(x=0, y=0, width=n, height=n,
               target=ElementaryTarget.TRIHEDRAL, looks=0),)))


def speckled_stack(n=8, looks=2, seed=17):
    return synth_scene(quadrant_scene(n, looks=looks, seed=seed))


class TestParamsJob:
    def test_trihedral_scene_alpha_is_zero(self):
        out = run_pipeline(trihedral_scene(), "params")
        assert np.nanmax(out.bands["alpha_gd"]) <= 1e-6
        assert np.nanmax(out.bands["tau_gd"]) <= 1e-6
        assert abs(np.nanmax(out.bands["p_gd"]) - 1.0) <= 1e-9
        assert np.allclose(out.bands["span"], 1.0)

    def test_matches_per_pixel_reference(self):
        stack = speckled_stack(6, looks=4, seed=11)
        out = run_pipeline(stack, "params")
        for i in range(stack.height):
            for j in range(stack.width):
                ref = params_for_pixel(stack.bands["t3"][i, j])
                got = {name: out.bands[name][i, j] for name in out.bands}
                np.testing.assert_allclose(got["alpha_gd"], ref.alpha, rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(got["tau_gd"], ref.tau, rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(got["p_gd"], ref.purity, rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(got["p_d"], ref.depolarization, rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(got["span"], ref.span, rtol=1e-12)

    def test_masked_pixels_are_nan(self):
        spec = SceneSpec(width=4, height=4, regions=(
            Region(x=0, y=0, width=4, height=2,
                   target=ElementaryTarget.DIHEDRAL, looks=0),))
        out = run_pipeline(synth_scene(spec), "params")
        assert np.isnan(out.bands["alpha_gd"][2:]).all()
        assert np.isfinite(out.bands["alpha_gd"][:2]).all()
        assert out.meta["nodata_pixels"] == 8
        assert not out.mask[2:].any()

    def test_nonfinite_input_pixels_dropped(self):
        stack = trihedral_scene(4)
        stack.bands["t3"][0, 0, 0, 0] = np.nan
        out = run_pipeline(stack, "params")
        assert not out.mask[0, 0]
        assert np.isnan(out.bands["span"][0, 0])
        assert out.meta["nodata_pixels"] == 1


class TestClassifyJob:
    def test_schemes_match_label_functions(self):
        from polgd.classify import classify_alpha, classify_pgd_alpha, classify_tau

        stack = speckled_stack(8, looks=4, seed=3)
        p = run_pipeline(stack, "params")
        for scheme, ref in (
            ("tau", classify_tau(p.bands["tau_gd"], p.mask)),
            ("alpha", classify_alpha(p.bands["alpha_gd"], p.mask)),
            ("pgd-alpha", classify_pgd_alpha(p.bands["p_gd"], p.bands["alpha_gd"], p.mask)),
        ):
            out = run_pipeline(stack, "classify", scheme=scheme)
            assert out.bands["class_map"].dtype == np.uint8
            assert np.array_equal(out.bands["class_map"], ref)

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ValueError, match="scheme"):
            run_pipeline(trihedral_scene(2), "classify", scheme="wishart")

    def test_unknown_job_rejected(self):
        with pytest.raises(ValueError, match="job"):
            run_pipeline(trihedral_scene(2), "decompose")
        assert PIPELINE_JOBS == ("params", "classify", "spff", "rgb")

    def test_missing_t3_rejected(self):
        bare = RasterStack(width=2, height=2)
        bare.bands["p"] = np.zeros((2, 2))
        with pytest.raises(ValueError, match="t3"):
            run_pipeline(bare, "params")


class TestSpffJob:
    def test_matches_per_pixel_reference(self):
        stack = speckled_stack(8, looks=2, seed=17)
        out = run_pipeline(stack, "spff")
        cfg = SpffConfig()
        for i in range(stack.height):
            for j in range(stack.width):
                t = stack.bands["t3"][i, j]
                dec = factorize_pixel(t, covariance_from_coherency(t), cfg)
                for tgt in cfg.target_set:
                    np.testing.assert_allclose(
                        out.bands[f"P_{tgt.value}"][i, j], dec.powers[tgt],
                        rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(out.bands["P_volume"][i, j], dec.volume,
                                           rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(out.bands["P_residue"][i, j], dec.residue,
                                           rtol=1e-12, atol=1e-12)
                assert out.bands["theta_ms"][i, j] == dec.theta_ms
                np.testing.assert_allclose(out.bands["gamma"][i, j], dec.gamma, rtol=1e-12)
                np.testing.assert_allclose(out.bands["span"][i, j], dec.span, rtol=1e-12)
                assert out.bands["branch"][i, j] == BRANCH_CODE[dec.branch]
                assert out.bands["best_target"][i, j] == cfg.target_set.index(dec.best_target) + 1
                assert out.bands["dominant"][i, j] == DOMINANT_CODE[dominant_label(dec)]
                assert out.bands["gamma_flag"][i, j] == int(dec.gamma_clamped)

    def test_band_set_is_declared(self):
        out = run_pipeline(speckled_stack(4), "spff")
        assert set(out.bands) == set(SPFF_FLOAT_BANDS) | set(SPFF_BYTE_BANDS)
        for name in SPFF_BYTE_BANDS:
            assert out.bands[name].dtype == np.uint8

    def test_conservation_and_nonnegativity(self):
        out = run_pipeline(speckled_stack(8, looks=3, seed=29), "spff")
        total = sum(out.bands[n] for n in SPFF_FLOAT_BANDS[:8])
        np.testing.assert_allclose(total, out.bands["span"], rtol=1e-9)
        for name in SPFF_FLOAT_BANDS[:8]:
            assert (out.bands[name] >= 0).all()

    def test_custom_target_set(self):
        cfg = SpffConfig(target_set=(ElementaryTarget.TRIHEDRAL, ElementaryTarget.DIHEDRAL))
        out = run_pipeline(speckled_stack(4), "spff", spff_config=cfg)
        assert "P_trihedral" in out.bands and "P_cylinder" not in out.bands
        assert out.bands["best_target"].max() <= 2

    def test_workers_and_tiling_are_bit_identical(self):
        stack = speckled_stack(16, looks=3, seed=41)
        base = run_pipeline(stack, "spff", workers=1, tile_rows=256)
        for workers, tile_rows in ((4, 256), (1, 8), (4, 3)):
            other = run_pipeline(stack, "spff", workers=workers, tile_rows=tile_rows)
            for name in SPFF_FLOAT_BANDS:
                assert np.array_equal(base.bands[name], other.bands[name], equal_nan=True)
            for name in SPFF_BYTE_BANDS:
                assert np.array_equal(base.bands[name], other.bands[name])

    def test_masked_pixels_closed_out(self):
        spec = SceneSpec(width=4, height=4, seed=1, regions=(
            Region(x=0, y=0, width=2, height=4, volume_gamma=1.0, looks=2),))
        out = run_pipeline(synth_scene(spec), "spff")
        assert out.meta["nodata_pixels"] == 8
        for name in SPFF_FLOAT_BANDS:
            assert np.isnan(out.bands[name][:, 2:]).all()
            assert np.isfinite(out.bands[name][:, :2]).all()
        for name in SPFF_BYTE_BANDS:
            assert (out.bands[name][:, 2:] == 0).all()
        assert (out.bands["branch"][:, :2] > 0).all()


class TestRgbJob:
    def test_groups_match_power_sums(self):
        spff = run_pipeline(speckled_stack(8, looks=2, seed=5), "spff")
        out = run_pipeline(spff, "rgb")
        b = spff.bands
        np.testing.assert_array_equal(out.bands["blue"], b["P_trihedral"] + b["P_cylinder"])
        np.testing.assert_array_equal(
            out.bands["red"], b["P_narrow_dihedral"] + b["P_dihedral"])
        np.testing.assert_array_equal(out.bands["green"], b["P_volume"] + b["P_residue"])
        np.testing.assert_array_equal(
            out.bands["hlx"], b["P_left_helix"] + b["P_right_helix"])

    def test_matches_per_pixel_composite(self):
        stack = speckled_stack(4, looks=2, seed=9)
        out = rgb_from_powers(run_pipeline(stack, "spff"))
        t = stack.bands["t3"][1, 2]
        ref = rgb_composite(factorize_pixel(t, covariance_from_coherency(t)))
        np.testing.assert_allclose(out.bands["red"][1, 2], ref.red, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(out.bands["green"][1, 2], ref.green, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(out.bands["blue"][1, 2], ref.blue, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(out.bands["hlx"][1, 2], ref.helix, rtol=1e-12, atol=1e-12)

    def test_needs_spff_bands(self):
        params = run_pipeline(trihedral_scene(2), "params")
        with pytest.raises(ValueError, match="spff"):
            run_pipeline(params, "rgb")


class TestBackends:
    def test_available_and_current(self):
        names = available_backends()
        assert "numpy" in names
        assert backend_name() in names

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            set_backend("fortran")

    @pytest.mark.skipif("numba" not in polgd.available_backends(),
                        reason="numba backend not importable")
    def test_backends_agree(self):
        stack = speckled_stack(12, looks=2, seed=23)
        try:
            set_backend("numpy")
            a = run_pipeline(stack, "spff")
            set_backend("numba")
            b = run_pipeline(stack, "spff")
        finally:
            set_backend(None)
        for name in SPFF_FLOAT_BANDS:
            np.testing.assert_allclose(a.bands[name], b.bands[name],
                                       rtol=1e-12, atol=1e-12, equal_nan=True)
        for name in SPFF_BYTE_BANDS:
            assert np.array_equal(a.bands[name], b.bands[name])
