"""Numerical checks for vector fields on C*-algebras and the endomorphism
semigroups they generate."""
from .algebra import (
    Conjugation,
    GaugeAlgebraElement,
    GaugeGroupElement,
    InnerField,
    cstar_norm,
    expm,
    involution,
)
from .config import ExperimentConfig, load_config
from .reports import CheckResult

__all__ = [
    "CheckResult",
    "Conjugation",
    "ExperimentConfig",
    "GaugeAlgebraElement",
    "GaugeGroupElement",
    "InnerField",
    "cstar_norm",
    "expm",
    "involution",
    "load_config",
]
__version__ = "0.1.0"
