"""Forward selection and debiased inference for linear SDF models.

The package estimates which nonlinear transforms of a small set of base
factors belong in the pricing kernel, using greedy forward selection on
cross-sectional fit, and corrects the post-selection bias of individual
loadings so their t-statistics can be taken at face value.

Layout:

    kernel      OLS and HAC building blocks shared by everything else
    panels      aligned return/factor containers
    terms       polynomial term enumeration and materialization
    fmb         two-pass cross-sectional estimation of SDF loadings
    selection   greedy forward selection with stopping rules
    debias      residualization-based debiased loadings and t-stats
    evaluation  cross-validation, out-of-sample, zoo, macro, placebo sims
    dataio      CSV/TOML input handling and deterministic report output
    cli         argparse front end over the pipeline stages
"""

from .debias import (
    DebiasedLoading,
    debias_set,
    debiased_loading,
    projection_precision_identity_holds,
    residualize_factor,
)
from .errors import FsfmbError
from .fmb import (
    SdfEstimate,
    cross_sectional_fit,
    estimate_sdf_loadings,
    predicted_returns,
    risk_premia,
    sample_covariances,
    sdf_series,
    time_series_betas,
)
from .kernel import HacSpec, LinearFit, auto_lag, hac_tstats, newey_west_lrv, ols
from .panels import FactorPanel, ReturnsPanel, check_aligned
from .selection import Objective, SelectionResult, StopRule, fs_fmb, fs_generic
from .terms import TermSpec, expand_terms, expanded_panel, materialize

__version__ = "0.1.0"

__all__ = [
    "DebiasedLoading",
    "FactorPanel",
    "FsfmbError",
    "HacSpec",
    "LinearFit",
    "Objective",
    "ReturnsPanel",
    "SdfEstimate",
    "SelectionResult",
    "StopRule",
    "TermSpec",
    "auto_lag",
    "check_aligned",
    "cross_sectional_fit",
    "debias_set",
    "debiased_loading",
    "estimate_sdf_loadings",
    "expand_terms",
    "expanded_panel",
    "fs_fmb",
    "fs_generic",
    "hac_tstats",
    "materialize",
    "newey_west_lrv",
    "ols",
    "predicted_returns",
    "projection_precision_identity_holds",
    "residualize_factor",
    "risk_premia",
    "sample_covariances",
    "sdf_series",
    "time_series_betas",
    "__version__",
]
