"""Cavity-enclosure toolkit: heat-equation indicator sweeps, broken-path
length extraction, and guaranteed voxel enclosures for strictly convex
cavities probed from the outer boundary."""

from ._core import (
    AssumptionError,
    EnclosureGrid,
    FitResult,
    Fixture,
    IndicatorSample,
    Minimizer,
    NumericalError,
    PathReport,
    Scene,
    SweepResult,
    SweepSample,
    UsageError,
    check_assumptions,
    dist_to_outer,
    enclose,
    extract_length,
    fixture,
    fixture_names,
    indicator,
    lambda_grid,
    laplace_ratio,
    load_scene,
    min_broken_path,
    save_scene,
    scene_from_json,
    soundness_check,
    sweep,
)

__all__ = [
    "AssumptionError",
    "EnclosureGrid",
    "FitResult",
    "Fixture",
    "IndicatorSample",
    "Minimizer",
    "NumericalError",
    "PathReport",
    "Scene",
    "SweepResult",
    "SweepSample",
    "UsageError",
    "check_assumptions",
    "dist_to_outer",
    "enclose",
    "extract_length",
    "extract_from_sweep",
    "fixture",
    "fixture_names",
    "indicator",
    "lambda_grid",
    "laplace_ratio",
    "load_scene",
    "min_broken_path",
    "save_scene",
    "scene_from_json",
    "soundness_check",
    "sweep",
]

__version__ = "0.1.0"


def extract_from_sweep(scene, p, region="real", mu_min=8.0, mu_max=40.0, count=9,
                       delta0=0.5, delta1=0.1, with_route=False):
    """One-call pipeline: lambda grid -> indicator sweep -> length fit."""
    grid = lambda_grid(region=region, mu_min=mu_min, mu_max=mu_max, count=count,
                       delta0=delta0, delta1=delta1)
    return extract_length(sweep(scene, p, grid, with_route=with_route))
