"""Evaluation battery: cross-validation, out-of-sample splits, restricted
fits, factor-zoo culling, macro diagnostics, and random-factor simulations."""

from .cv import CvReport, CvStep, assign_folds, asset_kfold_cv
from .oos import (
    OosModelResult,
    OosReport,
    RestrictedFit,
    SplitSpec,
    restricted_fit,
    time_split_oos,
)
from .zoo import (
    MimickingPortfolio,
    SpanningReport,
    SpanningResult,
    ZooCullReport,
    ZooFactorResult,
    mimicking_portfolio,
    spanning_regressions,
    zoo_cull_cross_sectional,
)
from .macro import CorrelationRow, ExposureRow, MacroReport, macro_diagnostics
from .simulation import SimulationReport, random_factor_simulation

__all__ = [
    "CvReport",
    "CvStep",
    "assign_folds",
    "asset_kfold_cv",
    "SplitSpec",
    "OosModelResult",
    "OosReport",
    "RestrictedFit",
    "time_split_oos",
    "restricted_fit",
    "ZooFactorResult",
    "ZooCullReport",
    "MimickingPortfolio",
    "SpanningResult",
    "SpanningReport",
    "zoo_cull_cross_sectional",
    "mimicking_portfolio",
    "spanning_regressions",
    "CorrelationRow",
    "ExposureRow",
    "MacroReport",
    "macro_diagnostics",
    "SimulationReport",
    "random_factor_simulation",
]
