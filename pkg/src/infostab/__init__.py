"""Numerical stability certificates for the parametric fundamental equation of information."""

from .core import (
    ALPHA_GUARD,
    H1,
    H2,
    Alpha,
    AlphaClass,
    ProbabilityVector,
    as_alpha,
    closed_bound_constant,
    k_alpha,
    t_alpha,
)
from .entropy import (
    MeasureSystem,
    degree_alpha,
    recursive_build,
    semi_symmetry_defect,
    shannon,
    system_certificate,
    two_symbol_degree_alpha,
)
from .equation import OpenTriangleSampler, SamplerScheme, residual, sup_residual
from .errors import (
    AlphaNearOne,
    CaseMismatch,
    ConfigError,
    DegenerateBasis,
    DegenerateGrid,
    InfostabError,
    InsufficientSlackSequence,
    NonFiniteValue,
    OutOfDomain,
    TabulatedExtrapolation,
    TAlphaUndefined,
    ZeroAlphaHasNoC,
)
from .functions import (
    ClosedFunction,
    LogForm,
    NoiseKind,
    PerturbationSpec,
    Perturbed,
    PowerForm,
    Tabulated,
)
from .stability import (
    LogPlusConst,
    Power,
    StabilityCertificate,
    certify_closed,
    certify_open,
    extract_candidate,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_GUARD",
    "H1",
    "H2",
    "Alpha",
    "AlphaClass",
    "ProbabilityVector",
    "as_alpha",
    "closed_bound_constant",
    "k_alpha",
    "t_alpha",
    "MeasureSystem",
    "degree_alpha",
    "recursive_build",
    "semi_symmetry_defect",
    "shannon",
    "system_certificate",
    "two_symbol_degree_alpha",
    "AlphaNearOne",
    "CaseMismatch",
    "ConfigError",
    "DegenerateBasis",
    "DegenerateGrid",
    "InfostabError",
    "InsufficientSlackSequence",
    "NonFiniteValue",
    "OutOfDomain",
    "TabulatedExtrapolation",
    "TAlphaUndefined",
    "ZeroAlphaHasNoC",
    "ClosedFunction",
    "LogForm",
    "NoiseKind",
    "PerturbationSpec",
    "Perturbed",
    "PowerForm",
    "Tabulated",
    "LogPlusConst",
    "Power",
    "StabilityCertificate",
    "certify_closed",
    "certify_open",
    "extract_candidate",
    "OpenTriangleSampler",
    "SamplerScheme",
    "residual",
    "sup_residual",
]
