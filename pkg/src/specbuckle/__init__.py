"""Buckling, Dirichlet and clamped-plate spectra on balls and intervals, with Weyl-type bounds."""

from .errors import (
    ConvergenceError,
    DomainError,
    EnumerationRangeError,
    InsufficientSpectrumError,
    RangeError,
    ResourceError,
    SpecbuckleError,
)
from .spectrum import BoundReport, Kind, Spectrum
from .ball import (
    BallSpectrum,
    ball_spectrum,
    buckling_eigenvalue,
    counting_identity_gap,
    cross_dimension_defect,
    dirichlet_eigenvalue,
    enumerate_modes,
    multiplicity,
)
from .interval import biharmonic_1d, first_n, interval_spectrum, lambda_1d, sigma_1d
from .riesz import WeylModel, asymptotic_fit, riesz_mean, weyl_two_term_model
from .avp import FiniteModel, avp_verify, run_suite

__version__ = "0.1.0"
