"""Temperature-dependent level shifts and the excited-state lifetime.

* :func:`splitting_shift` -- second-order phonon reduction of a doublet
  splitting, quadratic in temperature.
* :func:`line_position_shift` -- mean-energy shift of a doublet from the
  polar-basis treatment of the linear Jahn-Teller coupling, cubic in
  temperature.  Evaluated by adaptive quadrature.
* :func:`thermal_expansion_shift` -- shift proportional to the negative
  pressure of thermal expansion.
* :func:`mott_seitz_lifetime` -- thermally activated non-radiative decay.

Energy-like results follow the frequency convention of :mod:`phonolib.units`:
phonon frequencies are ordinary frequencies and ``hbar * omega`` becomes
``h * nu`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .doublet import OrbitalDoublet
from .errors import DomainError
from .quadrature import integrate
from .units import GHZ_PER_K, KB_MEV_PER_K, MEV_PER_GHZ, PhononBath

# ---------------------------------------------------------------------------
# Mott-Seitz lifetime


@dataclass(frozen=True)
class MottSeitzParams:
    tau0: float  # ns, lifetime at T = 0
    alpha: float  # dimensionless
    activation: float  # meV

    def __post_init__(self):
        if not self.tau0 > 0:
            raise DomainError(f"tau0 must be > 0 ns, got {self.tau0}")
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.activation > 0:
            raise DomainError(f"activation energy must be > 0 meV, got {self.activation}")


def mott_seitz_lifetime(params: MottSeitzParams, temperature):
    """Excited-state lifetime ``tau0 / (1 + alpha * exp(-dE / k_B T))`` in ns."""
    t = np.asarray(temperature, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    with np.errstate(divide="ignore", over="ignore"):
        boltz = np.where(t > 0, np.exp(-params.activation / (KB_MEV_PER_K * np.where(t > 0, t, 1.0))), 0.0)
    out = params.tau0 / (1.0 + params.alpha * boltz)
    return float(out) if out.ndim == 0 else out


def nonradiative_rate(params: MottSeitzParams, temperature, gamma_r: float):
    """``1/tau(T) - gamma_r`` in 1/ns; non-negative when ``gamma_r <= 1/tau0``."""
    return 1.0 / np.asarray(mott_seitz_lifetime(params, temperature)) - gamma_r


# ---------------------------------------------------------------------------
# Spin-orbit splitting reduction


@dataclass(frozen=True)
class SplittingShift:
    static: float  # GHz, temperature independent
    thermal: float  # GHz, vanishes at T = 0

    @property
    def total(self) -> float:
        return self.static + self.thermal


def splitting_shift_parts(doublet: OrbitalDoublet, bath: PhononBath) -> SplittingShift:
    """Static and thermal parts of the second-order splitting shift (GHz).

    ``static = -chi_rho * delta * nu_D**2`` and
    ``thermal = -chi_rho * delta * (2 pi^2 / 3) * (k_B T / h)**2``.
    """
    bath.check_splitting(doublet.splitting)
    pref = -bath.chi_rho * doublet.splitting
    thermal_freq = bath.temperature * GHZ_PER_K
    return SplittingShift(
        static=pref * bath.debye_frequency**2,
        thermal=pref * (2.0 * math.pi**2 / 3.0) * thermal_freq**2,
    )


def splitting_shift(doublet: OrbitalDoublet, bath: PhononBath) -> float:
    """Total second-order shift of the doublet splitting in GHz (always <= 0)."""
    return splitting_shift_parts(doublet, bath).total


# ---------------------------------------------------------------------------
# Optical line position (polar vibrational basis)

_SMALL_U = 1e-4
# exp(-u) underflows well before this; the integrand is exactly 0 beyond
_U_MAX = 800.0


def line_shift_integrand(u):
    """Thermal part ``(g(u) - 2) u**2`` of the line-position kernel.

    ``g(u) = 2 e^u (e^{2u} + 3) / ((e^u - 1)(e^u + 1)^2)`` tends to 2 as
    ``u -> inf`` (the temperature-independent part) and to ``2/u`` as
    ``u -> 0``.  Written in ``e^{-u}`` to avoid overflow.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u < _SMALL_U
    us = u[small]
    out[small] = 2.0 * us - 2.0 * us**2 + us**3 / 6.0
    ul = u[~small]
    q = np.exp(-ul)
    num = -2.0 * q + 8.0 * q**2 + 2.0 * q**3
    den = -np.expm1(-ul) * (1.0 + q) ** 2
    out[~small] = num / den * ul**2
    return out


@lru_cache(maxsize=4096)
def _line_shift_dimensionless(upper: float) -> float:
    upper = min(upper, _U_MAX)
    # split at the sign change of the kernel (u ~ 1.444) to help the panels
    pts = [0.0] + [p for p in (1.4436, 10.0, 50.0) if p < upper] + [upper]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += integrate(line_shift_integrand, lo, hi, abs_tol=1e-14, rel_tol=1e-12).value
    return total


def line_shift_integral(temperature: float, debye_temp: float) -> float:
    """``(k_B T / h)**3 * int_0^{Theta_D/T} (g(u) - 2) u^2 du`` in GHz^3.

    Zero at ``T = 0``.  Negative for all ``T > 0`` with the kernel above.
    """
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    freq = temperature * GHZ_PER_K
    return freq**3 * _line_shift_dimensionless(float(debye_temp) / float(temperature))


def line_position_shift(bath: PhononBath, temperature: float | None = None) -> float:
    """Temperature-dependent mean-energy shift of a doublet, in meV.

    Evaluates ``-2 chi_rho * int_0^{nu_D} [g(h nu / k_B T) - 2] nu^2 d nu``;
    the temperature-independent part (``g -> 2``) is reported by
    :func:`line_position_static` instead.  Returns exactly 0 at ``T = 0``.

    With the kernel as written the thermal part is positive for
    ``chi_rho > 0``; fits to measured line positions use a free signed
    amplitude so only the temperature dependence matters there.
    """
    t = bath.temperature if temperature is None else temperature
    return -2.0 * bath.chi_rho * line_shift_integral(t, bath.debye_temp) * MEV_PER_GHZ


def line_position_static(bath: PhononBath) -> float:
    """Temperature-independent mean-energy shift ``-4/3 chi_rho nu_D^3`` in meV."""
    return -2.0 * bath.chi_rho * (2.0 / 3.0) * bath.debye_frequency**3 * MEV_PER_GHZ


# ---------------------------------------------------------------------------
# Thermal expansion


def _monotone_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Spline node slopes passed through Hyman's monotonicity filter.

    Starting from not-a-knot spline derivatives keeps cubic data exact while
    the filter guarantees no overshoot between samples.
    """
    d = CubicSpline(x, y, bc_type="not-a-knot")(x, 1)
    delta = np.diff(y) / np.diff(x)
    out = d.copy()
    for i in range(len(x)):
        left = delta[i - 1] if i > 0 else delta[0]
        right = delta[i] if i < len(delta) else delta[-1]
        if left * right <= 0:
            out[i] = 0.0
            continue
        s = math.copysign(1.0, right)
        bound = 3.0 * min(abs(left), abs(right))
        out[i] = s * min(max(0.0, s * d[i]), bound)
    return out


@dataclass(frozen=True)
class ExpansionModel:
    """Thermal-expansion shift ``A * P(T)`` with ``P(T) = -B int_0^T e(x) dx``.

    ``pressure_coeff`` is A in meV/GPa, ``bulk_modulus`` is B in GPa and
    ``alpha_table`` is a pair of arrays (temperature K, coefficient 1/K).
    """

    pressure_coeff: float
    bulk_modulus: float
    alpha_table: tuple[np.ndarray, np.ndarray]
    _antideriv: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t, e = (np.asarray(a, dtype=float) for a in self.alpha_table)
        if t.ndim != 1 or t.shape != e.shape or len(t) < 4:
            raise DomainError("alpha_table needs >= 4 matching (T, e) samples")
        if not self.bulk_modulus > 0:
            raise DomainError(f"bulk modulus must be > 0, got {self.bulk_modulus}")
        if np.any(np.diff(t) <= 0):
            raise DomainError("alpha_table temperatures must be strictly increasing")
        if np.any(e < 0):
            raise DomainError("thermal expansion coefficients must be >= 0")
        if t[0] > 0:
            raise DomainError("alpha_table must start at T = 0 K")
        object.__setattr__(self, "alpha_table", (t, e))
        spline = CubicHermiteSpline(t, e, _monotone_slopes(t, e))
        object.__setattr__(self, "_antideriv", spline.antiderivative())

    @property
    def t_max(self) -> float:
        return float(self.alpha_table[0][-1])

    def pressure(self, temperature):
        """Negative thermal-expansion pressure ``P(T)`` in GPa."""
        t = np.asarray(temperature, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise DomainError(f"temperature outside expansion table range [0, {self.t_max}] K")
        out = -self.bulk_modulus * (self._antideriv(t) - self._antideriv(0.0))
        return float(out) if out.ndim == 0 else out

    def with_pressure_coeff(self, value: float) -> "ExpansionModel":
        return ExpansionModel(value, self.bulk_modulus, self.alpha_table)


def thermal_expansion_shift(model: ExpansionModel, temperature):
    """Transition-energy shift from thermal expansion, in meV."""
    return model.pressure_coeff * np.asarray(model.pressure(temperature)) + 0.0
