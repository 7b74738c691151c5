"""Registry of the temperature laws used in the analysis pipelines.

Every model is a :class:`ModelSpec`: a vectorised ``func(x, theta)``, an
optional analytic Jacobian, parameter names, default initial values and
bounds.  Models that depend on context (a fixed Debye temperature, a
thermal-expansion table, a peak count) are produced by factories, looked up
through :func:`get_model`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from ..doublet import EXCITED_SPLITTING_GHZ
from ..errors import UsageError
from ..shifts import ExpansionModel, line_shift_integral
from ..units import DEFAULT_DEBYE_TEMP_K, K_PER_GHZ, KB_MEV_PER_K, occupation_from_x

Func = Callable[[np.ndarray, np.ndarray], np.ndarray]

_INF = math.inf


@dataclass(frozen=True)
class ModelSpec:
    id: str
    param_names: tuple[str, ...]
    func: Func
    jac: Func | None
    initial: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    x_unit: str | None = None
    y_unit: str | None = None
    description: str = ""

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    def __call__(self, x, params) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float), np.asarray(params, dtype=float)), dtype=float)

    def jacobian(self, x, params) -> np.ndarray:
        """d f / d theta, shape (n_points, n_params)."""
        x = np.asarray(x, dtype=float)
        params = np.asarray(params, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(x, params), dtype=float)
        return numeric_jacobian(self.func, x, params)

    def with_bounds(self, lower=None, upper=None, initial=None) -> "ModelSpec":
        return replace(
            self,
            lower=tuple(self.lower if lower is None else lower),
            upper=tuple(self.upper if upper is None else upper),
            initial=tuple(self.initial if initial is None else initial),
        )


def numeric_jacobian(func: Func, x: np.ndarray, params: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite differences with a relative step."""
    cols = []
    for i, p in enumerate(params):
        h = rel_step * max(abs(p), 1e-8)
        up = params.copy()
        dn = params.copy()
        up[i] += h
        dn[i] -= h
        cols.append((np.asarray(func(x, up)) - np.asarray(func(x, dn))) / (2 * h))
    return np.column_stack(cols)


# ---------------------------------------------------------------------------


def linear() -> ModelSpec:
    return ModelSpec(
        "linear",
        ("intercept", "slope"),
        lambda x, p: p[0] + p[1] * x,
        lambda x, p: np.column_stack([np.ones_like(x), x]),
        (0.0, 1.0),
        (-_INF, -_INF),
        (_INF, _INF),
        description="y = intercept + slope * x",
    )


def offset_cubic() -> ModelSpec:
    return ModelSpec(
        "offset_cubic",
        ("offset", "coeff"),
        lambda x, p: p[0] + p[1] * x**3,
        lambda x, p: np.column_stack([np.ones_like(x), x**3]),
        (0.0, 1e-3),
        (-_INF, -_INF),
        (_INF, _INF),
        x_unit="k",
        description="y = offset + coeff * T^3",
    )


def power_law(with_offset: bool = False, exponent: float | None = None) -> ModelSpec:
    """``y = amplitude * x**exponent [+ offset]``; ``exponent`` may be held fixed."""
    if exponent is None:
        names = ["amplitude", "exponent"]

        def f(x, p):
            return p[0] * x ** p[1] + (p[2] if with_offset else 0.0)

        def j(x, p):
            xa = x ** p[1]
            with np.errstate(invalid="ignore", divide="ignore"):
                cols = [xa, p[0] * xa * np.log(x)]
            if with_offset:
                cols.append(np.ones_like(x))
            return np.column_stack(cols)

        init, lo, hi = [1.0, 2.0], [-_INF, 0.05], [_INF, 10.0]
        label = "power_law"
    else:
        k = float(exponent)
        names = ["amplitude"]

        def f(x, p):
            return p[0] * x**k + (p[1] if with_offset else 0.0)

        def j(x, p):
            cols = [x**k]
            if with_offset:
                cols.append(np.ones_like(x))
            return np.column_stack(cols)

        init, lo, hi = [1.0], [-_INF], [_INF]
        label = f"power_law[{k:g}]"
    if with_offset:
        names.append("offset")
        init.append(0.0)
        lo.append(-_INF)
        hi.append(_INF)
    return ModelSpec(label, tuple(names), f, j, tuple(init), tuple(lo), tuple(hi), description="y = a x^k (+ c)")


def bose_t1() -> ModelSpec:
    """Orbital relaxation rate ``prefactor * n(splitting, T - temp_offset)`` (1/ns)."""

    def parts(x, p):
        tp = x - p[2]
        with np.errstate(divide="ignore", invalid="ignore"):
            xx = np.where(tp > 0, K_PER_GHZ * p[1] / np.where(tp > 0, tp, 1.0), np.nan)
        return tp, xx

    def f(x, p):
        tp, xx = parts(x, p)
        return p[0] * np.where(np.isfinite(xx), occupation_from_x(np.nan_to_num(xx, nan=1.0)), np.nan)

    def j(x, p):
        tp, xx = parts(x, p)
        n = occupation_from_x(np.nan_to_num(xx, nan=1.0))
        dn_dx = -n * (n + 1.0)
        return np.column_stack([
            n,
            p[0] * dn_dx * K_PER_GHZ / tp,
            p[0] * dn_dx * K_PER_GHZ * p[1] / tp**2,
        ])

    return ModelSpec(
        "bose_t1",
        ("prefactor", "splitting", "temp_offset"),
        f,
        j,
        (0.01, 50.0, 0.0),
        (0.0, 1.0, 0.0),
        (10.0, 2000.0, 4.0),
        x_unit="k",
        y_unit="per_ns",
        description="1/T1 = prefactor * n(splitting, T - temp_offset)",
    )


def mott_seitz() -> ModelSpec:
    def boltz(x, p):
        return np.exp(-p[2] / (KB_MEV_PER_K * x))

    def f(x, p):
        return p[0] / (1.0 + p[1] * boltz(x, p))

    def j(x, p):
        b = boltz(x, p)
        d = 1.0 + p[1] * b
        return np.column_stack([
            1.0 / d,
            -p[0] * b / d**2,
            p[0] * p[1] * b / (KB_MEV_PER_K * x) / d**2,
        ])

    return ModelSpec(
        "mott_seitz",
        ("tau0", "alpha", "activation"),
        f,
        j,
        (1.7, 1.0, 50.0),
        (1e-3, 0.0, 1.0),
        (100.0, 1e3, 500.0),
        x_unit="k",
        y_unit="ns",
        description="tau(T) = tau0 / (1 + alpha exp(-activation / k_B T))",
    )


def splitting_t2() -> ModelSpec:
    return ModelSpec(
        "splitting_t2",
        ("splitting0", "coeff"),
        lambda x, p: p[0] - p[1] * x**2,
        lambda x, p: np.column_stack([np.ones_like(x), -(x**2)]),
        (50.0, 1e-4),
        (-_INF, -_INF),
        (_INF, _INF),
        x_unit="k",
        y_unit="ghz",
        description="splitting(T) = splitting0 - coeff * T^2",
    )


@lru_cache(maxsize=256)
def _line_shift_basis(xs: tuple[float, ...], debye_temp: float) -> np.ndarray:
    ref = line_shift_integral(300.0, debye_temp)
    return np.array([line_shift_integral(t, debye_temp) for t in xs]) / ref


def line_shift_quadrature(debye_temp: float = DEFAULT_DEBYE_TEMP_K) -> ModelSpec:
    """``y = offset + shift_300k * S(T) / S(300 K)`` with S the line-position integral."""

    def f(x, p):
        return p[0] + p[1] * _line_shift_basis(tuple(np.asarray(x, dtype=float).tolist()), float(debye_temp))

    return ModelSpec(
        "line_shift_quadrature",
        ("offset", "shift_300k"),
        f,
        None,
        (0.0, 1.0),
        (-_INF, -_INF),
        (_INF, _INF),
        x_unit="k",
        description=f"phonon line-position integral, Debye temperature {debye_temp:g} K",
    )


def thermal_expansion(model: ExpansionModel) -> ModelSpec:
    """``y = offset + pressure_coeff * P(T)``, P from the expansion table (GPa)."""

    def f(x, p):
        return p[0] + p[1] * np.asarray(model.pressure(x))

    return ModelSpec(
        "thermal_expansion",
        ("offset", "pressure_coeff"),
        f,
        None,
        (0.0, 1.0),
        (-_INF, -_INF),
        (_INF, _INF),
        x_unit="k",
        description="thermal-expansion shift A * P(T)",
    )


def lorentzian_multi(n_peaks: int, baseline: bool = False) -> ModelSpec:
    """Sum of area-normalised Lorentzians; per-peak (center, fwhm, area)."""
    if n_peaks < 1:
        raise UsageError("n_peaks must be >= 1")

    def f(x, p):
        out = np.full_like(x, p[-1] if baseline else 0.0)
        for k in range(n_peaks):
            c, w, a = p[3 * k : 3 * k + 3]
            out = out + a * (w / (2 * math.pi)) / ((x - c) ** 2 + (w / 2) ** 2)
        return out

    def j(x, p):
        cols = []
        for k in range(n_peaks):
            c, w, a = p[3 * k : 3 * k + 3]
            d = (x - c) ** 2 + (w / 2) ** 2
            cols.append(a * (w / (2 * math.pi)) * 2 * (x - c) / d**2)
            cols.append(a / (2 * math.pi) * ((x - c) ** 2 - (w / 2) ** 2) / d**2)
            cols.append((w / (2 * math.pi)) / d)
        if baseline:
            cols.append(np.ones_like(x))
        return np.column_stack(cols)

    names = [f"{q}_{k}" for k in range(n_peaks) for q in ("center", "fwhm", "area")]
    init = [0.0, 1.0, 1.0] * n_peaks
    lo = [-_INF, 1e-9, 1e-12] * n_peaks
    hi = [_INF, _INF, _INF] * n_peaks
    if baseline:
        names.append("baseline")
        init.append(0.0)
        lo.append(-_INF)
        hi.append(_INF)
    return ModelSpec(
        "lorentzian_multi",
        tuple(names),
        f,
        j,
        tuple(init),
        tuple(lo),
        tuple(hi),
        x_unit="ghz",
        description=f"{n_peaks} Lorentzian peaks",
    )


def exp_recovery() -> ModelSpec:
    """``h(tau) = h_inf - (h_inf - h0) exp(-tau / t1)``."""

    def f(x, p):
        return p[0] - (p[0] - p[1]) * np.exp(-x / p[2])

    def j(x, p):
        e = np.exp(-x / p[2])
        return np.column_stack([1.0 - e, e, -(p[0] - p[1]) * e * x / p[2] ** 2])

    return ModelSpec(
        "exp_recovery",
        ("h_inf", "h0", "t1"),
        f,
        j,
        (1.0, 0.0, 10.0),
        (-_INF, -_INF, 1e-6),
        (_INF, _INF, 1e9),
        x_unit="ns",
        description="single-exponential recovery",
    )


@lru_cache(maxsize=64)
def _linewidth_basis(xs: tuple[float, ...], splitting: float, alpha: float, activation: float, debye_temp: float):
    from ..doublet import OrbitalDoublet
    from ..rates import two_phonon_dephasing_rate
    from ..units import PhononBath, bose_occupation

    t = np.array(xs)
    mott = 1.0 + alpha * np.exp(-activation / (KB_MEV_PER_K * t))
    # single-phonon basis in MHz per unit chi_rho (1e-9 scaled)
    single = 1e3 * splitting**3 * bose_occupation(splitting, t) * 1e-9
    d = OrbitalDoublet(splitting)
    deph = np.array([
        two_phonon_dephasing_rate(d, PhononBath(1e-9, ti, debye_temp), lowest_order=False) for ti in t
    ]) * 1e3 / (2 * math.pi)
    return mott, single, deph


def linewidth(
    splitting: float = EXCITED_SPLITTING_GHZ,
    alpha: float = 3.3,
    activation: float = 55.0,
    debye_temp: float = DEFAULT_DEBYE_TEMP_K,
) -> ModelSpec:
    """Composite optical FWHM (MHz) with floor, one-phonon and dephasing couplings.

    Parameters are the lifetime-limited floor in MHz and the one-phonon and
    two-phonon couplings in units of 1e-9 (so ``chi_rho = 1e-9 * value``).
    The Mott-Seitz shape and splitting are held fixed.
    """

    def f(x, p):
        mott, single, deph = _linewidth_basis(
            tuple(np.asarray(x, dtype=float).tolist()), splitting, alpha, activation, debye_temp
        )
        return p[0] * mott + p[1] * single + p[2] ** 2 * deph

    def j(x, p):
        mott, single, deph = _linewidth_basis(
            tuple(np.asarray(x, dtype=float).tolist()), splitting, alpha, activation, debye_temp
        )
        return np.column_stack([mott, single, 2 * p[2] * deph])

    return ModelSpec(
        "linewidth",
        ("floor_mhz", "chi_rho_single_e9", "chi_rho_dephasing_e9"),
        f,
        j,
        (90.0, 10.0, 100.0),
        (1.0, 0.0, 0.0),
        (1e4, 1e4, 1e5),
        x_unit="k",
        y_unit="mhz",
        description="gamma_r + gamma_nr(T) + gamma_up(T) + gamma_d(T), as FWHM",
    )


REGISTRY: dict[str, Callable[..., ModelSpec]] = {
    "linear": linear,
    "power_law": power_law,
    "offset_cubic": offset_cubic,
    "bose_t1": bose_t1,
    "mott_seitz": mott_seitz,
    "splitting_t2": splitting_t2,
    "line_shift_quadrature": line_shift_quadrature,
    "thermal_expansion": thermal_expansion,
    "lorentzian_multi": lorentzian_multi,
    "exp_recovery": exp_recovery,
    "linewidth": linewidth,
}


def get_model(model_id: str, **context) -> ModelSpec:
    try:
        factory = REGISTRY[model_id]
    except KeyError:
        raise UsageError(f"unknown model {model_id!r}; choose from {sorted(REGISTRY)}") from None
    return factory(**context)
