import numpy as np
import pytest

from polgd.algebra import ElementaryTarget
from polgd.synth import Region, SceneSpec


def random_hermitian_psd(rng, scale=1.0):
    """Random 3x3 Hermitian PSD matrix (a physical coherency pixel)."""
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    t = a @ a.conj().T * scale
    return (t + t.conj().T) / 2


def random_scattering(rng):
    from polgd.algebra import ScatteringMatrix

    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    return ScatteringMatrix(*v)


def random_kennaugh(rng):
    """Kennaugh matrix of a random physical (PSD coherency) pixel."""
    from polgd.algebra import kennaugh_from_coherency

    return kennaugh_from_coherency(random_hermitian_psd(rng))


def quadrant_scene(n: int, looks: int, seed: int = 7) -> SceneSpec:
    """Four-quadrant test scene: trihedral / dihedral / volume / 50-50 mixture."""
    h = n // 2
    return SceneSpec(
        width=n,
        height=n,
        seed=seed,
        regions=(
            Region(x=0, y=0, width=h, height=h,
                   target=ElementaryTarget.TRIHEDRAL, looks=looks),
            Region(x=h, y=0, width=n - h, height=h,
                   target=ElementaryTarget.DIHEDRAL, looks=looks),
            Region(x=0, y=h, width=h, height=n - h,
                   volume_gamma=1.0, looks=looks),
            Region(x=h, y=h, width=n - h, height=n - h,
                   mixture={"trihedral": 0.5, "dihedral": 0.5}, looks=looks),
        ),
    )


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Compile the numba kernel once so timed tests measure steady state."""
    import polgd
    from polgd.pipeline import run_pipeline
    from polgd.synth import synth_scene

    if "numba" in polgd.available_backends():
        run_pipeline(synth_scene(quadrant_scene(4, looks=0)), "spff")
    yield
