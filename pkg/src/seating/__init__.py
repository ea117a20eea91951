"""Solvers for exchange-stable and envy-free seating on path and cycle tables."""

from .exact import Criterion
from .judge import PotentialValue, Witness
from .profile import (
    CYCLE,
    PATH,
    Arrangement,
    ClassStructure,
    PreferenceProfile,
    Topology,
    ValueProfileMeta,
)

__all__ = [
    "Arrangement",
    "ClassStructure",
    "Criterion",
    "CYCLE",
    "PATH",
    "PotentialValue",
    "PreferenceProfile",
    "Topology",
    "ValueProfileMeta",
    "Witness",
]

__version__ = "0.1.0"
