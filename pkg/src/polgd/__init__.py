"""polgd: geodesic-distance scattering analysis for polarimetric SAR.

Distances between scattering representations are measured as great-circle
angles on the unit sphere of flattened matrices; everything else (angle
parameters, classifiers, the power factorization engine, the raster
pipeline) is built on that one measure.
"""

from .algebra import (
    COHERENT_TARGETS,
    ElementaryTarget,
    ScatteringMatrix,
    as_coherency,
    as_covariance,
    as_kennaugh,
    coherency_from_covariance,
    coherency_from_kennaugh,
    covariance_from_coherency,
    elementary_target,
    fry_kattawar_residual,
    grvm_kennaugh,
    kennaugh_from_coherency,
    kennaugh_from_scattering,
    rotate_kennaugh,
    span,
)
from .backend import available_backends, backend_name, set_backend
from .classify import (
    AlphaZone,
    alpha_zone,
    feasible_boundary,
    pgd_alpha_class,
    tau_segment,
)
from .geodesic import (
    gd_coherency,
    gd_covariance,
    gd_kennaugh,
    gd_scattering,
    similarity,
)
from .params import (
    RollInvariantParams,
    alpha_gd,
    depolarization_index,
    params_for_pixel,
    purity_gd,
    tau_gd,
)
from .pipeline import run_pipeline
from .raster import RasterStack, read_c3, read_t3, write_bands, write_png, write_t3
from .spff import (
    DEFAULT_TARGET_SET,
    PowerDecomposition,
    RgbComposite,
    SpffConfig,
    convex_split,
    dominant_label,
    factorize_pixel,
    gamma_ratio,
    optimize_orientation,
    rgb_composite,
)
from .synth import Region, SceneSpec, scene_from_json, synth_scene

__version__ = "0.1.0"

__all__ = [
    "COHERENT_TARGETS",
    "ElementaryTarget",
    "ScatteringMatrix",
    "as_coherency",
    "as_covariance",
    "as_kennaugh",
    "coherency_from_covariance",
    "coherency_from_kennaugh",
    "covariance_from_coherency",
    "elementary_target",
    "fry_kattawar_residual",
    "grvm_kennaugh",
    "kennaugh_from_coherency",
    "kennaugh_from_scattering",
    "rotate_kennaugh",
    "span",
    "available_backends",
    "backend_name",
    "set_backend",
    "AlphaZone",
    "alpha_zone",
    "feasible_boundary",
    "pgd_alpha_class",
    "tau_segment",
    "gd_coherency",
    "gd_covariance",
    "gd_kennaugh",
    "gd_scattering",
    "similarity",
    "RollInvariantParams",
    "alpha_gd",
    "depolarization_index",
    "params_for_pixel",
    "purity_gd",
    "tau_gd",
    "run_pipeline",
    "RasterStack",
    "read_c3",
    "read_t3",
    "write_bands",
    "write_png",
    "write_t3",
    "DEFAULT_TARGET_SET",
    "PowerDecomposition",
    "RgbComposite",
    "SpffConfig",
    "convex_split",
    "dominant_label",
    "factorize_pixel",
    "gamma_ratio",
    "optimize_orientation",
    "rgb_composite",
    "Region",
    "SceneSpec",
    "scene_from_json",
    "synth_scene",
    "__version__",
]
