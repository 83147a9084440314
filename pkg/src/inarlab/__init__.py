"""Simulation and verification lab for aggregated randomized INAR(1) processes."""

from .models import (
    AtomsMixing,
    BetaMixing,
    Degenerate,
    GeneralMixing,
    InarModel,
    MixingLaw,
    RandomizedModel,
)
from .rng import RngStream

__all__ = [
    "AtomsMixing",
    "BetaMixing",
    "Degenerate",
    "GeneralMixing",
    "InarModel",
    "MixingLaw",
    "RandomizedModel",
    "RngStream",
]

__version__ = "0.1.0"
