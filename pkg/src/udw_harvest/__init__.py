"""Entanglement-harvesting observables for Unruh-DeWitt detector pairs:
pointlike, Gaussian-smeared, and coherently delocalized center of mass,
in vacuum or in a slow-wave medium."""

__version__ = "0.1.0"

from .scenario import (  # noqa: F401
    Delocalized,
    HarvestResult,
    Pointlike,
    RegimeRejectedError,
    ScenarioConfig,
    Smeared,
    regime_check,
)
from .compute import harvest  # noqa: F401
