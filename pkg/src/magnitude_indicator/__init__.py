"""Magnitude and hypervolume indicators of anchored dominated sets."""
from .errors import MagnitudeError
from .geometry import (
    active_indices,
    as_points,
    coordinate_subsets,
    das_dennis_grid,
    nondominated_filter,
    nondominated_layers,
    project,
    translate_to_anchor,
)
from .indicators import (
    IndicatorValue,
    ShadowDecomposition,
    box_magnitude,
    box_magnitude_terms,
    finite_space_magnitude,
    hv_2d,
    hv_3d,
    hv_incl_excl,
    hypervolume,
    mag_incl_excl,
    magnitude,
    magnitude_projection,
    planar_zero_anchored_magnitude,
    projected_hypervolumes,
    shadow_decomposition,
)
from .optimizer import AscentConfig, AscentTrajectory, run_ascent
from .problems import get_problem, stationarity_probe
from .subgradients import finite_difference_gradient, hv_subgradient_tie_shared, mag_subgradient

__version__ = "0.1.0"

__all__ = [
    "AscentConfig",
    "AscentTrajectory",
    "IndicatorValue",
    "MagnitudeError",
    "ShadowDecomposition",
    "active_indices",
    "as_points",
    "box_magnitude",
    "box_magnitude_terms",
    "coordinate_subsets",
    "das_dennis_grid",
    "finite_difference_gradient",
    "finite_space_magnitude",
    "get_problem",
    "hv_2d",
    "hv_3d",
    "hv_incl_excl",
    "hv_subgradient_tie_shared",
    "hypervolume",
    "mag_incl_excl",
    "mag_subgradient",
    "magnitude",
    "magnitude_projection",
    "nondominated_filter",
    "nondominated_layers",
    "planar_zero_anchored_magnitude",
    "project",
    "projected_hypervolumes",
    "run_ascent",
    "shadow_decomposition",
    "stationarity_probe",
    "translate_to_anchor",
]
