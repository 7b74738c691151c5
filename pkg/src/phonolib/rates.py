"""Phonon-induced transition and dephasing rates of an orbital doublet.

All rates are in 1/ns, splittings in GHz and temperatures in K.  The
coupling ``chi_rho`` of a :class:`~phonolib.units.PhononBath` is the single
calibration constant per doublet: one-phonon rates scale with ``chi_rho``
and two-phonon rates with ``chi_rho**2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .doublet import OrbitalDoublet
from .errors import DomainError, PreconditionError, UsageError, ValidityWarning
from .quadrature import integrate
from .shifts import MottSeitzParams, mott_seitz_lifetime
from .units import (
    GHZ_PER_K,
    K_PER_GHZ,
    PhononBath,
    bose_occupation,
    boltzmann_argument,
    rate_to_fwhm_mhz,
)

__all__ = [
    "RateSet",
    "LinewidthParams",
    "T1Params",
    "BudgetRow",
    "single_phonon_rates",
    "single_phonon_linear_approx",
    "two_phonon_dephasing_rate",
    "raman_rate_scaling",
    "linewidth_components",
    "linewidth_model",
    "t1_rate",
    "t1_model",
    "chi_rho_from_t1",
    "coherence_budget",
]


@dataclass(frozen=True)
class RateSet:
    gamma_up: float
    gamma_down: float
    gamma_dephase: float = 0.0

    def __post_init__(self):
        if self.gamma_up < 0 or self.gamma_dephase < 0:
            raise DomainError("rates must be non-negative")
        if self.gamma_down < self.gamma_up:
            raise DomainError("downward rate cannot be smaller than the upward rate")

    @property
    def t1(self) -> float:
        """Population relaxation time ``1/(gamma_up + gamma_down)`` in ns."""
        return 1.0 / (self.gamma_up + self.gamma_down)


def _spontaneous_rate(doublet: OrbitalDoublet, bath: PhononBath) -> float:
    return 2.0 * math.pi * bath.chi_rho * doublet.splitting**3


def single_phonon_rates(doublet: OrbitalDoublet, bath: PhononBath) -> RateSet:
    """Direct one-phonon absorption / emission rates.

    ``gamma_up = 2 pi chi_rho delta^3 n``, ``gamma_down = 2 pi chi_rho delta^3 (n + 1)``
    with ``n`` the Bose occupation at the splitting.
    """
    bath.check_splitting(doublet.splitting)
    pref = _spontaneous_rate(doublet, bath)
    n = bose_occupation(doublet.splitting, bath.temperature)
    return RateSet(pref * n, pref * (n + 1.0))


def single_phonon_linear_approx(doublet: OrbitalDoublet, bath: PhononBath) -> float:
    """High-temperature limit ``2 pi chi_rho delta^2 k_B T / h`` of the one-phonon rate."""
    bath.check_splitting(doublet.splitting)
    if bath.temperature <= doublet.splitting * K_PER_GHZ:
        raise PreconditionError(
            f"linear approximation needs T > h delta / k_B = {doublet.splitting * K_PER_GHZ:.4g} K"
        )
    return 2.0 * math.pi * bath.chi_rho * doublet.splitting**2 * bath.temperature * GHZ_PER_K


def _dephasing_kernel(x_delta: float):
    # n(x_delta + u) * (x_delta + u) * u * (n(u) + 1), in units of (k_B T / h)^2
    def f(u):
        u = np.asarray(u, dtype=float)
        s = x_delta + u
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            n_s = np.where(s > 700, 0.0, 1.0 / np.expm1(np.minimum(s, 700)))
            u_np1 = np.where(u > 1e-8, u / -np.expm1(-u), 1.0 + u / 2.0)
            out = n_s * s * u_np1
        # n(s) s underflows to exactly 0 long before s overflows
        return np.where(s > 700, 0.0, out)

    return f


def two_phonon_dephasing_rate(
    doublet: OrbitalDoublet,
    bath: PhononBath,
    *,
    chi_rho: float | None = None,
    lowest_order: bool = True,
) -> float:
    """Pure-dephasing rate from elastic two-phonon scattering, in 1/ns.

    With ``lowest_order=True`` this is ``(2 pi^3 / 3) delta^2 chi_rho^2 (k_B T/h)^3``,
    valid for ``h delta << k_B T << h nu_D`` (a :class:`ValidityWarning` is
    issued outside a factor-5 margin).  With ``lowest_order=False`` the full
    one-dimensional integral

        ``2 pi delta^2 chi_rho^2 int_0^{nu_D} n(delta + nu) (n(nu) + 1) (delta + nu) nu d nu``

    is evaluated by quadrature, which suppresses the rate when
    ``k_B T <~ h delta``.

    ``chi_rho`` overrides the bath coupling (used when the dephasing channel
    is calibrated separately from the one-phonon channel).
    """
    bath.check_splitting(doublet.splitting)
    t = bath.temperature
    if t <= 0:
        raise DomainError("two-phonon dephasing rate is undefined at T = 0")
    cr = bath.chi_rho if chi_rho is None else chi_rho
    if cr < 0:
        raise DomainError("chi_rho must be >= 0")
    delta = doublet.splitting
    thermal_freq = t * GHZ_PER_K
    if lowest_order:
        t_split = delta * K_PER_GHZ
        if t < 5.0 * t_split or t > bath.debye_temp / 5.0:
            warnings.warn(
                f"T = {t:.4g} K outside the T^3 window ({5 * t_split:.3g} K, {bath.debye_temp / 5:.3g} K)",
                ValidityWarning,
                stacklevel=2,
            )
        return (2.0 * math.pi**3 / 3.0) * delta**2 * cr**2 * thermal_freq**3
    x_delta = float(boltzmann_argument(delta, t))
    upper = min(bath.debye_temp / t, 800.0)
    val = integrate(_dephasing_kernel(x_delta), 0.0, upper, abs_tol=1e-300, rel_tol=1e-11).value
    return 2.0 * math.pi * delta**2 * cr**2 * thermal_freq**3 * val


def raman_rate_scaling(prefactor: float, temperature: float) -> float:
    """Inelastic two-phonon (high-strain) relaxation, ``prefactor * T^5``."""
    if prefactor < 0:
        raise DomainError(f"Raman prefactor must be >= 0, got {prefactor}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    return prefactor * temperature**5


# ---------------------------------------------------------------------------
# Composite optical linewidth


@dataclass(frozen=True)
class LinewidthParams:
    """Parameters of ``Gamma(T) = gamma_r + gamma_nr(T) + gamma_up^u(T) + gamma_d(T)``.

    ``bath.temperature`` is ignored; the model is evaluated at the requested T.
    ``dephasing_chi_rho`` (default: ``bath.chi_rho``) sets the two-phonon
    channel.  ``lowest_order_dephasing`` switches between the pure ``T^3``
    law and the full integral.  ``upper_branch`` selects ``gamma_down^u`` in
    place of ``gamma_up^u`` (lines A/B originate on the upper excited branch).
    """

    gamma_r: float
    nr_model: MottSeitzParams
    doublet_u: OrbitalDoublet
    bath: PhononBath
    dephasing_chi_rho: float | None = None
    lowest_order_dephasing: bool = False
    upper_branch: bool = False

    def __post_init__(self):
        if not self.gamma_r > 0:
            raise DomainError(f"radiative rate must be > 0, got {self.gamma_r}")
        if self.gamma_r > 1.0 / self.nr_model.tau0 * (1 + 1e-12):
            raise DomainError("radiative rate exceeds total decay rate 1/tau0 at T = 0")
        self.bath.check_splitting(self.doublet_u.splitting)

    @property
    def floor_mhz(self) -> float:
        """Lifetime-limited width ``(gamma_r + gamma_nr(0)) / 2 pi`` in MHz."""
        return float(rate_to_fwhm_mhz(1.0 / self.nr_model.tau0))


def linewidth_components(params: LinewidthParams, temperature: float) -> dict[str, float]:
    """Individual rate contributions (1/ns) to the homogeneous linewidth."""
    t = float(temperature)
    if t < 0:
        raise DomainError("temperature must be >= 0")
    total_decay = 1.0 / mott_seitz_lifetime(params.nr_model, t)
    bath = params.bath.at(t)
    if t == 0:
        rates = RateSet(0.0, _spontaneous_rate(params.doublet_u, bath))
        dephase = 0.0
    else:
        rates = single_phonon_rates(params.doublet_u, bath)
        dephase = two_phonon_dephasing_rate(
            params.doublet_u,
            bath,
            chi_rho=params.dephasing_chi_rho,
            lowest_order=params.lowest_order_dephasing,
        )
    orbital = rates.gamma_down if params.upper_branch else rates.gamma_up
    return {
        "radiative": params.gamma_r,
        "nonradiative": total_decay - params.gamma_r,
        "orbital": orbital,
        "dephasing": dephase,
    }


def linewidth_model(params: LinewidthParams, temperature):
    """Homogeneous optical FWHM in MHz (each rate contributes ``rate / 2 pi``)."""
    t = np.asarray(temperature, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        vals = [sum(linewidth_components(params, float(ti)).values()) for ti in t.ravel()]
    out = rate_to_fwhm_mhz(np.array(vals)).reshape(t.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Ground-state T1 and coherence budget


@dataclass(frozen=True)
class T1Params:
    """``1/T1 = prefactor * n(splitting, T - temp_offset)``."""

    prefactor: float  # 1/ns
    splitting: float  # GHz
    temp_offset: float = 0.0  # K

    def __post_init__(self):
        if not self.prefactor > 0:
            raise DomainError("T1 prefactor must be > 0")
        if not self.splitting > 0:
            raise DomainError("T1 splitting must be > 0")
        if not self.temp_offset >= 0:
            raise DomainError("temperature offset must be >= 0")


def t1_rate(params: T1Params, temperature):
    t = np.asarray(temperature, dtype=float)
    if np.any(t <= params.temp_offset):
        raise DomainError(f"T1 model undefined for T <= offset {params.temp_offset} K")
    return params.prefactor * bose_occupation(params.splitting, t - params.temp_offset)


def t1_model(params: T1Params, temperature):
    """Orbital relaxation time in ns (``inf`` where the rate underflows)."""
    r = t1_rate(params, temperature)
    with np.errstate(divide="ignore"):
        out = 1.0 / np.asarray(r, dtype=float)
    return float(out) if out.ndim == 0 else out


def chi_rho_from_t1(params: T1Params) -> float:
    """Coupling that makes ``2 pi chi_rho delta^3`` equal the T1 prefactor."""
    return params.prefactor / (2.0 * math.pi * params.splitting**3)


@dataclass(frozen=True)
class BudgetRow:
    splitting: float  # GHz
    temperature: float  # K
    inv_gamma_up: float  # ns
    inv_gamma_down: float  # ns
    t1: float  # ns
    t2_upper_bound: float  # ns, 2 T1 ceiling on orbital-limited coherence


def coherence_budget(bath: PhononBath, doublet_grid, temp_grid, calib: T1Params) -> list[BudgetRow]:
    """Relaxation timescales over a grid of splittings and temperatures.

    ``chi_rho`` is fixed by the calibration anchor (``calib.splitting``) and
    held constant while the splitting changes, so ``gamma`` scales as
    ``delta^3 n(delta, T)``.  ``bath`` supplies the Debye cutoff only.
    The T2 column is the orbital-T1 ceiling ``2 / (gamma_up + gamma_down)``,
    an upper bound rather than a prediction.
    """
    deltas = list(doublet_grid)
    temps = list(temp_grid)
    if not deltas or not temps:
        raise UsageError("splitting and temperature grids must be non-empty")
    chi_rho = chi_rho_from_t1(calib)
    rows = []
    for delta in deltas:
        doublet = OrbitalDoublet(float(delta))
        for t in temps:
            t_eff = float(t) - calib.temp_offset
            if t_eff < 0:
                raise DomainError(f"T = {t} K is below the calibration offset")
            b = PhononBath(chi_rho, t_eff, bath.debye_temp)
            r = single_phonon_rates(doublet, b)
            total = r.gamma_up + r.gamma_down
            rows.append(
                BudgetRow(
                    splitting=float(delta),
                    temperature=float(t),
                    inv_gamma_up=math.inf if r.gamma_up == 0 else 1.0 / r.gamma_up,
                    inv_gamma_down=1.0 / r.gamma_down,
                    t1=1.0 / total,
                    t2_upper_bound=2.0 / total,
                )
            )
    return rows
