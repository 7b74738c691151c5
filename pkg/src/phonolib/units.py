"""Physical constants, canonical units and thermal-occupation primitives.

Canonical units used by every public function in the package:

========== ==========================================
quantity   unit
========== ==========================================
frequency  GHz (ordinary frequency nu, *not* angular)
temperature K
time       ns
energy     meV
rate       1/ns
========== ==========================================

Splittings are ordinary frequencies, so the dimensionless Boltzmann argument
is ``x = h * nu / (k_B * T)`` with Planck's ``h`` rather than ``hbar``.  Under
this convention a 50 GHz splitting corresponds to ``h nu / k_B = 2.3996 K``.
Because GHz = 1/ns, a frequency in GHz can be used directly as a rate in 1/ns.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, PreconditionError, ValidityWarning

# SI-2019 exact values
PLANCK = 6.62607015e-34  # J s
BOLTZMANN = 1.380649e-23  # J / K
ELEMENTARY_CHARGE = 1.602176634e-19  # C
SPEED_OF_LIGHT = 299792458.0  # m / s

#: temperature equivalent of 1 GHz, h * 1 GHz / k_B
K_PER_GHZ = PLANCK * 1e9 / BOLTZMANN
#: frequency equivalent of 1 K, k_B * 1 K / h
GHZ_PER_K = 1.0 / K_PER_GHZ
#: Boltzmann constant in meV / K
KB_MEV_PER_K = BOLTZMANN / ELEMENTARY_CHARGE * 1e3
#: energy of a 1 GHz quantum in meV
MEV_PER_GHZ = PLANCK * 1e9 / ELEMENTARY_CHARGE * 1e3

DEFAULT_DEBYE_TEMP_K = 2230.0

# Below this x the occupation is evaluated from its Laurent series.
_SERIES_X = 1e-6
# Above this x exp(x) overflows in double precision; occupation underflows to 0.
_UNDERFLOW_X = 700.0

# Minimum Debye-to-splitting ratio: hard error below the first, warning below the second.
BATH_RATIO_ERROR = 10.0
BATH_RATIO_WARN = 100.0


def ghz_to_kelvin(freq_ghz):
    return np.multiply(freq_ghz, K_PER_GHZ)


def kelvin_to_ghz(temp_k):
    return np.multiply(temp_k, GHZ_PER_K)


def ghz_to_mev(freq_ghz):
    return np.multiply(freq_ghz, MEV_PER_GHZ)


def mev_to_ghz(energy_mev):
    return np.divide(energy_mev, MEV_PER_GHZ)


def wavelength_nm_to_ghz(wavelength_nm):
    return SPEED_OF_LIGHT / (np.asarray(wavelength_nm, dtype=float) * 1e-9) / 1e9


def rate_to_fwhm_mhz(rate_per_ns):
    """Lorentzian FWHM in MHz contributed by a decay rate given in 1/ns.

    A population decay at rate ``gamma`` broadens a line to FWHM
    ``gamma / (2 pi)`` in ordinary frequency units.
    """
    return np.asarray(rate_per_ns) * 1e3 / (2.0 * math.pi)


def fwhm_mhz_to_rate(fwhm_mhz):
    return np.asarray(fwhm_mhz) * 2.0 * math.pi / 1e3


def _scalar_or_array(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def boltzmann_argument(delta, temperature):
    """Return ``x = h delta / (k_B T)``; ``inf`` where ``T == 0``."""
    delta = np.asarray(delta, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(temperature > 0, K_PER_GHZ * delta / np.where(temperature > 0, temperature, 1.0), np.inf)
    return x


def _check_delta_t(delta, temperature, *, allow_zero_t=True):
    delta = np.asarray(delta, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(~np.isfinite(delta)) or np.any(delta <= 0):
        raise DomainError(f"splitting must be positive and finite, got {delta}")
    if np.any(np.isnan(temperature)) or np.any(temperature < 0):
        raise DomainError(f"temperature must be non-negative, got {temperature}")
    if not allow_zero_t and np.any(temperature == 0):
        raise DomainError("temperature must be strictly positive")
    return delta, temperature


def occupation_from_x(x):
    """Bose-Einstein occupation ``1/(e^x - 1)`` as a function of ``x >= 0``.

    ``x = inf`` gives 0.  Small ``x`` uses ``1/x - 1/2`` and very large ``x``
    underflows to exactly 0.
    """
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_X
    large = x > _UNDERFLOW_X
    mid = ~(small | large)
    out = np.zeros_like(x)
    with np.errstate(divide="ignore"):
        out[small] = 1.0 / x[small] - 0.5
    out[mid] = 1.0 / np.expm1(x[mid])
    return _scalar_or_array(out)


def bose_occupation(delta, temperature):
    """Thermal phonon occupation at frequency ``delta`` (GHz) and temperature (K).

    Parameters
    ----------
    delta : float or array_like
        Mode frequency in GHz, strictly positive.
    temperature : float or array_like
        Temperature in K, non-negative.  ``T = 0`` returns exactly 0.

    Returns
    -------
    float or ndarray
        ``1 / (exp(h delta / k_B T) - 1)``.
    """
    delta, temperature = _check_delta_t(delta, temperature)
    return occupation_from_x(boltzmann_argument(delta, temperature))


def thermal_ratio(delta, temperature):
    """Detailed-balance ratio ``exp(h delta / k_B T) = (n + 1) / n``.

    Returns ``math.inf`` at ``T = 0`` (and wherever the exponential overflows)
    instead of raising; callers treat it as the "no upward transitions" limit.
    """
    delta, temperature = _check_delta_t(delta, temperature)
    x = boltzmann_argument(delta, temperature)
    with np.errstate(over="ignore"):
        out = np.exp(x)
    return _scalar_or_array(out)


@dataclass(frozen=True)
class PhononBath:
    """Acoustic phonon bath seen by one orbital doublet.

    ``chi_rho`` is the product of the coupling and density-of-modes
    proportionality constants, in units such that ``2 pi chi_rho delta**3``
    is a rate in 1/ns when ``delta`` is in GHz.  ``debye_temp`` sets the
    cutoff frequency ``k_B * debye_temp / h``.
    """

    chi_rho: float
    temperature: float
    debye_temp: float = DEFAULT_DEBYE_TEMP_K

    def __post_init__(self):
        if not np.isfinite(self.chi_rho) or self.chi_rho < 0:
            raise DomainError(f"chi_rho must be >= 0, got {self.chi_rho}")
        if not np.isfinite(self.debye_temp) or self.debye_temp <= 0:
            raise DomainError(f"debye_temp must be > 0, got {self.debye_temp}")
        if np.isnan(self.temperature) or self.temperature < 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def debye_frequency(self) -> float:
        """Cutoff frequency in GHz."""
        return self.debye_temp * GHZ_PER_K

    def at(self, temperature: float) -> "PhononBath":
        return replace(self, temperature=temperature)

    def check_splitting(self, delta: float) -> None:
        """Require the Debye cutoff to lie far above ``delta``.

        Raises below a ratio of 10 and warns below 100.
        """
        if delta <= 0:
            raise DomainError(f"splitting must be positive, got {delta}")
        ratio = self.debye_frequency / delta
        if ratio <= BATH_RATIO_ERROR:
            raise PreconditionError(
                f"Debye cutoff {self.debye_frequency:.4g} GHz is only {ratio:.3g}x the "
                f"splitting {delta:.4g} GHz (need > {BATH_RATIO_ERROR:g})"
            )
        if ratio <= BATH_RATIO_WARN:
            warnings.warn(
                f"Debye cutoff / splitting = {ratio:.3g} < {BATH_RATIO_WARN:g}; "
                "acoustic-phonon rate laws are marginal",
                ValidityWarning,
                stacklevel=3,
            )
