"""Free-fermion su(1|1) long-range spin chains: dispersion, thermodynamics, entanglement, density."""

from .errors import (
    ClassificationAmbiguous,
    DegenerateGroundState,
    DomainError,
    EigensolverFailure,
    ExpansionOrderUndetected,
    NonMonotoneDispersion,
    OracleMismatch,
    PoleError,
    QuadratureNonConvergence,
    SizeCapExceeded,
    Su11Error,
)
from .model import HS, XX, ChainSpec, Elliptic, Regime, Tabulated, critical_point, dispersion

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "Elliptic",
    "XX",
    "HS",
    "Tabulated",
    "Regime",
    "dispersion",
    "critical_point",
    "Su11Error",
    "DomainError",
    "PoleError",
    "NonMonotoneDispersion",
    "ExpansionOrderUndetected",
    "DegenerateGroundState",
    "QuadratureNonConvergence",
    "EigensolverFailure",
    "ClassificationAmbiguous",
    "SizeCapExceeded",
    "OracleMismatch",
]
