"""Phonon-limited relaxation, dephasing and line shifts of orbital doublets.

Submodules
----------
units      constants, unit conversions, Bose occupation, phonon bath
rates      one- and two-phonon rates, optical linewidth, T1 and budgets
shifts     splitting, line-position, thermal-expansion and lifetime laws
dynamics   rate-equation simulation of pulsed optical pumping
spectra    four-line spectra and Lorentzian deconvolution
fit        least-squares engine and the temperature-law registry
"""

__version__ = "0.1.0"

from .doublet import Branch, OrbitalDoublet, excited_doublet, ground_doublet
from .errors import (
    ConfigError,
    DatasetError,
    DomainError,
    FitError,
    PhonolibError,
    PreconditionError,
    QuadratureError,
    StructuralError,
    UsageError,
    ValidityWarning,
)
from .units import PhononBath, bose_occupation, thermal_ratio

__all__ = [
    "Branch",
    "ConfigError",
    "DatasetError",
    "DomainError",
    "FitError",
    "OrbitalDoublet",
    "PhononBath",
    "PhonolibError",
    "PreconditionError",
    "QuadratureError",
    "StructuralError",
    "UsageError",
    "ValidityWarning",
    "__version__",
    "bose_occupation",
    "excited_doublet",
    "ground_doublet",
    "thermal_ratio",
]
