"""Equilibrium shapes of charged conducting interfaces with curvature-dependent surface tension."""

from .errors import ElectroMeniscusError, NoSolution
from .meniscus import PRESETS, MaterialPreset, derive_problem, limit_potential, shoot, solve, sweep
from .tolman import TensionLaw, TolmanModel, normalized_tension

__version__ = "0.1.0"

__all__ = [
    "ElectroMeniscusError",
    "NoSolution",
    "PRESETS",
    "MaterialPreset",
    "TensionLaw",
    "TolmanModel",
    "derive_problem",
    "limit_potential",
    "normalized_tension",
    "shoot",
    "solve",
    "sweep",
    "__version__",
]
