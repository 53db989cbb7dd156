"""Symmetric norms and anti-norms of positive matrices and spectral scales."""
from .errors import (
    AntinormError,
    DomainError,
    FlagVerificationError,
    NotHermitianError,
    ParseError,
    PreconditionError,
    UnsupportedCombination,
    WitnessNotFound,
)
from .functions import ScalarFunction, compose_classS, parse_function, require_flags, verify_properties
from .gauges import (
    Derived,
    FKDet,
    KyFan,
    LogMean,
    MarcusLopes,
    Mixture,
    OperatorSup,
    PowerCompose,
    QLift,
    Schatten,
    SchattenQ,
    TailIntegral,
    antinorm_eval,
    norm_eval,
    spec_from_json,
)
from .linalg import eigh, elementary_symmetric, haar_unitary, polar, psd_margin
from .majorization import relation_check
from .orbit import agm_witness, dominance_unitary, mixed_witness, orbit_witness, triangle_witness
from .reports import InequalityReport
from .spectral import AnalyticScale, SpectralScale, named_scale, scale_integral, spectral_scale
from .suite import SuiteConfig, run_suite

__version__ = "0.1.0"
