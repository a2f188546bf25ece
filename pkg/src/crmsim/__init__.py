"""crmsim: simulation of completely random measures via arrival-time augmentation."""

from .arrival_kernels import ArrivalKernel, MellinStripError
from .constructions import (
    AugmentedAtom,
    PairCatalogEntry,
    TruncatedCRM,
    UnsupportedPairError,
    asymptotic_inverse,
    catalog_entry,
    conditional_density_phi,
    conditional_density_phibar,
    laplace_exponent,
    psi_density,
    psi_inverse,
    sample_exchangeable,
    sample_iid,
    sample_rosinski_ggp,
    sample_sequential,
)
from .distributions import EtgBfryParams, RngStream
from .error_analysis import (
    ErrorReport,
    InfiniteVarianceWarning,
    asymptotic_error,
    conditional_error_moments,
    error_mgf,
    fit_loglog_slope,
    likelihood_bound,
    mc_truncation_error,
    mixture_prior_demo,
)
from .size_measures import RegularVariationData, SizeMeasure
from .special_math import BracketError, QuadratureError, Tolerance

__version__ = "0.1.0"

__all__ = [
    "ArrivalKernel",
    "AugmentedAtom",
    "BracketError",
    "ErrorReport",
    "EtgBfryParams",
    "InfiniteVarianceWarning",
    "MellinStripError",
    "PairCatalogEntry",
    "QuadratureError",
    "RegularVariationData",
    "RngStream",
    "SizeMeasure",
    "Tolerance",
    "TruncatedCRM",
    "UnsupportedPairError",
    "asymptotic_error",
    "asymptotic_inverse",
    "catalog_entry",
    "conditional_density_phi",
    "conditional_density_phibar",
    "conditional_error_moments",
    "error_mgf",
    "fit_loglog_slope",
    "laplace_exponent",
    "likelihood_bound",
    "mc_truncation_error",
    "mixture_prior_demo",
    "psi_density",
    "psi_inverse",
    "sample_exchangeable",
    "sample_iid",
    "sample_rosinski_ggp",
    "sample_sequential",
]
