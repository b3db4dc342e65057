"""Synthetic polarimetric scene generation.

Scenes are rectangular regions painted onto a raster, each region carrying a
model coherency matrix (an elementary target, a random volume of given
co-polar ratio, or a convex mixture) and an optional number of speckle looks.
With L looks the pixel value is the L-sample average of outer products of
circular complex Gaussian draws from the model, the standard fully developed
speckle model; looks = 0 writes the noise-free model matrix itself.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .algebra import (
    ElementaryTarget,
    coherency_from_kennaugh,
    elementary_target,
    grvm_kennaugh,
)
from .raster import LoadError, RasterStack

__all__ = ["Region", "SceneSpec", "model_coherency", "synth_scene", "scene_from_json"]


@dataclass(frozen=True)
class Region:
    """One painted rectangle.

    Exactly one of ``target``, ``volume_gamma`` or ``mixture`` must be set.
    ``mixture`` maps component names (target values, or "volume:<gamma>") to
    convex weights. ``looks`` is the speckle look count, 0 for noise-free.
    """

    x: int
    y: int
    width: int
    height: int
    target: ElementaryTarget | None = None
    volume_gamma: float | None = None
    mixture: dict[str, float] | None = None
    span: float = 1.0
    looks: int = 1

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("region must have positive size")
        given = sum(x is not None for x in (self.target, self.volume_gamma, self.mixture))
        if given != 1:
            raise ValueError("region needs exactly one of target, volume_gamma, mixture")
        if self.span <= 0 or not np.isfinite(self.span):
            raise ValueError("region span must be positive")
        if self.looks < 0:
            raise ValueError("looks must be >= 1, or 0 for a noise-free region")


@dataclass(frozen=True)
class SceneSpec:
    """Full scene description; later regions overwrite earlier ones."""

    width: int
    height: int
    regions: tuple[Region, ...]
    seed: int = 0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("scene must have positive size")
        if not self.regions:
            raise ValueError("scene needs at least one region")
        object.__setattr__(self, "regions", tuple(self.regions))


def _component_coherency(name: str) -> np.ndarray:
    """Unit-trace coherency of a named mixture component."""
    if name.startswith("volume"):
        gamma = 1.0
        if ":" in name:
            gamma = float(name.split(":", 1)[1])
        t = coherency_from_kennaugh(grvm_kennaugh(gamma))
    else:
        t = coherency_from_kennaugh(elementary_target(ElementaryTarget(name)))
    return t / np.trace(t).real


def model_coherency(region: Region) -> np.ndarray:
    """Model coherency matrix of a region, trace equal to the region span."""
    if region.target is not None:
        t = _component_coherency(region.target.value)
    elif region.volume_gamma is not None:
        t = _component_coherency(f"volume:{region.volume_gamma}")
    else:
        weights = np.array(list(region.mixture.values()), dtype=np.float64)
        if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0, atol=1e-9):
            raise ValueError("mixture weights must be convex")
        t = sum(
            w * _component_coherency(name)
            for name, w in region.mixture.items()
        )
    return t * region.span


def _sample_speckled(rng: np.random.Generator, t_model: np.ndarray,
                     n_pix: int, looks: int) -> np.ndarray:
    """Draw n_pix looks-averaged sample coherency matrices from one model."""
    # factor handles rank-deficient models, which coherent targets all are
    vals, vecs = np.linalg.eigh(t_model)
    vals = np.maximum(vals, 0.0)
    a = vecs * np.sqrt(vals)
    g = rng.standard_normal((looks, n_pix, 3)) + 1j * rng.standard_normal((looks, n_pix, 3))
    z = (g @ a.T) / np.sqrt(2.0)
    t = np.einsum("lpi,lpj->pij", z, z.conj()) / looks
    return t


def synth_scene(spec: SceneSpec) -> RasterStack:
    """Rasterize a scene spec; uncovered pixels are masked out as nodata.

    Deterministic for a fixed spec: one generator seeded with spec.seed
    drives all regions in listed order.
    """
    t3 = np.zeros((spec.height, spec.width, 3, 3), dtype=np.complex128)
    covered = np.zeros((spec.height, spec.width), dtype=bool)
    rng = np.random.default_rng(spec.seed)
    for region in spec.regions:
        x0, y0 = region.x, region.y
        x1, y1 = x0 + region.width, y0 + region.height
        if x0 < 0 or y0 < 0 or x1 > spec.width or y1 > spec.height:
            raise ValueError("region extends outside the scene")
        t_model = model_coherency(region)
        if region.looks == 0:
            t3[y0:y1, x0:x1] = t_model
        else:
            n_pix = region.width * region.height
            samples = _sample_speckled(rng, t_model, n_pix, region.looks)
            t3[y0:y1, x0:x1] = samples.reshape(region.height, region.width, 3, 3)
        covered[y0:y1, x0:x1] = True
    return RasterStack(width=spec.width, height=spec.height,
                       bands={"t3": t3}, mask=covered)


def scene_from_json(path: str | os.PathLike) -> SceneSpec:
    """Load a scene spec from a JSON file.

    Schema: {"width", "height", "seed", "regions": [{"x", "y", "width",
    "height", one of "target" | "volume_gamma" | "mixture", "span", "looks"}]}
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise LoadError(f"cannot read scene spec {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed scene spec {path}: {e}") from e
    try:
        regions = tuple(
            Region(
                x=int(r["x"]),
                y=int(r["y"]),
                width=int(r["width"]),
                height=int(r["height"]),
                target=ElementaryTarget(r["target"]) if "target" in r else None,
                volume_gamma=float(r["volume_gamma"]) if "volume_gamma" in r else None,
                mixture={str(k): float(v) for k, v in r["mixture"].items()}
                if "mixture" in r
                else None,
                span=float(r.get("span", 1.0)),
                looks=int(r.get("looks", 1)),
            )
            for r in doc["regions"]
        )
        return SceneSpec(
            width=int(doc["width"]),
            height=int(doc["height"]),
            regions=regions,
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed scene spec {path}: {e}") from e
