"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data validation error.
Every subcommand accepts ``--config FILE`` with a JSON object whose keys
mirror the long option names (dashes or underscores); explicit command-line
flags win over config-file values.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from .algebra import ElementaryTarget, elementary_target
from .classify import boundary_table, legend_lines
from .params import alpha_gd, tau_gd
from .pipeline import run_pipeline
from .raster import (
    LoadError,
    read_t3,
    write_bands,
    write_class_map,
    write_png,
    write_t3,
)
from .spff import DOMINANT_LABELS, SpffConfig
from .synth import scene_from_json, synth_scene

log = logging.getLogger(__name__)

# display order of the angle reference table
_TABLE_ORDER = (
    ElementaryTarget.RIGHT_HELIX,
    ElementaryTarget.LEFT_HELIX,
    ElementaryTarget.DIHEDRAL,
    ElementaryTarget.NARROW_DIHEDRAL,
    ElementaryTarget.QUARTER_WAVE_PLUS,
    ElementaryTarget.QUARTER_WAVE_MINUS,
    ElementaryTarget.DIPOLE,
    ElementaryTarget.CYLINDER,
    ElementaryTarget.TRIHEDRAL,
)

_PARAM_BANDS = ["alpha_gd", "tau_gd", "p_gd", "p_d", "span"]


def _out_stream(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline="", encoding="ascii"), True


def _cmd_params(args) -> int:
    stack = read_t3(args.t3dir)
    out = run_pipeline(stack, "params", workers=args.workers, tile_rows=args.tile_rows)
    write_bands(out, args.out, names=_PARAM_BANDS)
    print(f"wrote {', '.join(_PARAM_BANDS)} to {args.out} "
          f"({out.meta['nodata_pixels']} nodata pixels)")
    return 0


def _cmd_classify(args) -> int:
    stack = read_t3(args.t3dir)
    out = run_pipeline(stack, "classify", scheme=args.scheme,
                       workers=args.workers, tile_rows=args.tile_rows)
    labels = out.bands["class_map"]
    write_class_map(labels, out.mask, args.out, "class_map", legend_lines(args.scheme))
    counts = np.bincount(labels.ravel(), minlength=9)
    used = {int(lbl): int(c) for lbl, c in enumerate(counts) if c}
    print(f"wrote class_map ({args.scheme}) to {args.out}; label counts {used}")
    return 0


def _cmd_spff(args) -> int:
    cfg = SpffConfig(
        theta_grid_step=args.theta_step,
        branch_swapped=(args.branch_map == "swapped"),
    )
    stack = read_t3(args.t3dir)
    out = run_pipeline(stack, "spff", spff_config=cfg,
                       workers=args.workers, tile_rows=args.tile_rows)
    band_names = [n for n in out.bands]
    write_bands(out, args.out, names=band_names)
    with open(os.path.join(args.out, "dominant.txt"), "w", encoding="ascii") as fh:
        fh.write("0 nodata\n")
        fh.write("\n".join(f"{i + 1} {n}" for i, n in enumerate(DOMINANT_LABELS)) + "\n")
    composite = run_pipeline(out, "rgb")
    rgb = np.stack(
        [composite.bands["red"], composite.bands["green"], composite.bands["blue"]],
        axis=2,
    )
    png_path = os.path.join(args.out, "composite.png")
    write_png(rgb, composite.mask, png_path, clip_sigma=args.png_clip)
    print(f"wrote {len(band_names)} bands and composite.png to {args.out}")
    return 0


def _cmd_synth(args) -> int:
    spec = scene_from_json(args.scene)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    stack = synth_scene(spec)
    write_t3(stack, args.out)
    print(f"wrote {stack.height}x{stack.width} coherency scene to {args.out}")
    return 0


def _cmd_boundary(args) -> int:
    rows = boundary_table(args.dm)
    fh, close = _out_stream(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["curve", "m", "p_gd", "alpha_gd_deg"])
        for curve, m, p, a in rows:
            w.writerow([curve, f"{m:.6f}", f"{p:.9f}", f"{a:.6f}"])
    finally:
        if close:
            fh.close()
    if close:
        print(f"wrote {len(rows)} boundary samples to {args.out}")
    return 0


def _cmd_table2(args) -> int:
    fh, close = _out_stream(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["target", "alpha_gd_deg", "tau_gd_deg"])
        for tgt in _TABLE_ORDER:
            k = elementary_target(tgt)
            w.writerow([tgt.value, f"{alpha_gd(k):.4f}", f"{tau_gd(k):.4f}"])
    finally:
        if close:
            fh.close()
    if close:
        print(f"wrote angle table to {args.out}")
    return 0


def _add_raster_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=1,
                   help="thread count for tile processing (default 1)")
    p.add_argument("--tile-rows", type=int, default=256,
                   help="rows per processing tile (default 256)")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="polgd",
        description="Geodesic-distance scattering analysis for polarimetric SAR rasters.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress details")
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_)
        p.add_argument("--config", metavar="FILE",
                       help="JSON file of option defaults for this subcommand")
        p.set_defaults(func=func)
        table[name] = p
        return p

    p = sub("params", _cmd_params, "write roll-invariant parameter bands")
    p.add_argument("t3dir", help="input coherency directory (config.txt + T*.bin)")
    p.add_argument("-o", "--out", required=True, help="output directory")
    _add_raster_opts(p)

    p = sub("classify", _cmd_classify, "write a class-label band plus legend")
    p.add_argument("t3dir", help="input coherency directory")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=("tau", "alpha", "pgd-alpha"),
                   default="pgd-alpha", help="classification scheme (default pgd-alpha)")
    _add_raster_opts(p)

    p = sub("spff", _cmd_spff, "factorize pixel power over elementary targets")
    p.add_argument("t3dir", help="input coherency directory")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--theta-step", type=float, default=0.1,
                   help="orientation grid step in degrees (default 0.1)")
    p.add_argument("--branch-map", choices=("normal", "swapped"), default="normal",
                   help="swap the volume-rank branch routing (default normal)")
    p.add_argument("--png-clip", type=float, default=2.0,
                   help="composite stretch clip in sigmas above the mean; "
                        "<= 0 stretches to the channel maximum (default 2.0)")
    _add_raster_opts(p)

    p = sub("synth", _cmd_synth, "rasterize a synthetic scene spec to a coherency directory")
    p.add_argument("scene", help="scene spec JSON "
                   "(regions of targets, volumes or mixtures; looks=0 means noise-free)")
    p.add_argument("-o", "--out", required=True, help="output coherency directory")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scene's speckle seed")

    p = sub("boundary", _cmd_boundary, "write the feasible-region boundary curves as CSV")
    p.add_argument("-o", "--out", default="-", help="output CSV path, - for stdout")
    p.add_argument("--dm", type=float, default=0.001,
                   help="mixture-parameter sampling step (default 0.001)")

    p = sub("table2", _cmd_table2, "write the elementary-target angle reference table as CSV")
    p.add_argument("-o", "--out", default="-", help="output CSV path, - for stdout")

    return parser, table


def _apply_config(argv: list[str], table: dict[str, argparse.ArgumentParser]) -> None:
    """Bake --config file values in as subcommand defaults."""
    cmd = next((a for a in argv if not a.startswith("-")), None)
    if cmd not in table:
        return
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        return
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"cannot load config {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    known = {a.dest for a in table[cmd]._actions}
    defaults = {}
    for key, value in doc.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ValueError(f"config {path}: unknown option {key!r} for {cmd}")
        defaults[dest] = value
    table[cmd].set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = build_parser()
    try:
        _apply_config(argv, table)
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (LoadError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    raise SystemExit(main())
