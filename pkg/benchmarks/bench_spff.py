"""Time the spff pipeline kernel: numba backend vs pure-numpy fallback.

Run from the repo root:

    python3 benchmarks/bench_spff.py --size 256 --looks 4 --repeats 3

The first numba call compiles, so one untimed warmup run precedes the
timed repeats. Both backends are checked against each other before timing.
"""

import argparse
import time

import numpy as np

import polgd
from polgd.algebra import ElementaryTarget
from polgd.backend import set_backend
from polgd.pipeline import run_pipeline
from polgd.synth import Region, SceneSpec, synth_scene


def make_stack(size, looks, seed):
    h = size // 2
    spec = SceneSpec(width=size, height=size, seed=seed, regions=(
        Region(x=0, y=0, width=h, height=h,
               target=ElementaryTarget.TRIHEDRAL, looks=looks),
        Region(x=h, y=0, width=size - h, height=h,
               target=ElementaryTarget.DIHEDRAL, looks=looks),
        Region(x=0, y=h, width=h, height=size - h,
               volume_gamma=1.0, looks=looks),
        Region(x=h, y=h, width=size - h, height=size - h,
               mixture={"trihedral": 0.5, "dihedral": 0.5}, looks=looks),
    ))
    return synth_scene(spec)


def time_backend(name, stack, repeats, theta_step, workers):
    from polgd.spff import SpffConfig

    set_backend(name)
    cfg = SpffConfig(theta_grid_step=theta_step)
    out = run_pipeline(stack, "spff", spff_config=cfg, workers=workers)  # warmup
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_pipeline(stack, "spff", spff_config=cfg, workers=workers)
        times.append(time.perf_counter() - t0)
    return out, min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256, help="scene edge in pixels")
    ap.add_argument("--looks", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--theta-step", type=float, default=0.1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    backends = polgd.available_backends()
    stack = make_stack(args.size, args.looks, args.seed)
    npix = args.size * args.size
    print(f"scene {args.size}x{args.size}, {args.looks} looks, "
          f"theta step {args.theta_step} deg, {args.workers} worker(s)")

    results = {}
    for name in backends:
        out, best = time_backend(name, stack, args.repeats, args.theta_step,
                                 args.workers)
        results[name] = (out, best)
        print(f"{name:>6}: {best * 1e3:8.1f} ms  ({npix / best / 1e6:6.2f} Mpx/s)")
    set_backend(None)

    if len(results) == 2:
        (out_a, t_a), (out_b, t_b) = results["numba"], results["numpy"]
        worst = 0.0
        for band in out_a.bands:
            a, b = out_a.bands[band], out_b.bands[band]
            if a.dtype == np.uint8:
                assert np.array_equal(a, b), f"byte band {band} disagrees"
            else:
                worst = max(worst, float(np.nanmax(np.abs(a - b))))
        print(f"speedup numba/numpy: {t_b / t_a:.1f}x, "
              f"worst float band difference {worst:.2e}")
    else:
        print("numba backend not importable; timed the numpy fallback only")


if __name__ == "__main__":
    main()
