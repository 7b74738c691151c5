"""Exponent extraction and information-criterion model ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, FitError, PhonolibError, UsageError
from .dataset import Dataset
from .engine import FitResult, fit_model
from .models import ModelSpec, power_law


def power_law_exponent(data: Dataset, with_offset: bool = False, *, n_starts: int = 8, seed: int = 0):
    """Fit ``y = a x**alpha (+ c)`` and return ``(alpha, sigma_alpha)``.

    Without an offset the data must be of one sign; negative series are
    mirrored so that the log-log initial guess is meaningful.  The initial
    exponent comes from a straight-line fit in log-log space.
    """
    if len(data) < 6:
        raise UsageError(f"power_law_exponent needs >= 6 points, got {len(data)}")
    if np.any(data.x <= 0):
        raise DomainError("power-law abscissae must be > 0")
    y = data.y
    sign = 1.0
    if not with_offset:
        if np.all(y > 0):
            sign = 1.0
        elif np.all(y < 0):
            sign = -1.0
        else:
            raise DomainError("sign-mixed data cannot follow a pure power law; use with_offset=True")
    ys = sign * y
    if with_offset:
        # shift so the smallest-|x| point sits just above zero for the guess
        c0 = ys[0] - 0.01 * (np.max(ys) - np.min(ys) + 1e-300)
        if ys[-1] < ys[0]:
            sign, ys = -sign, -ys
            c0 = ys[0] - 0.01 * (np.max(ys) - np.min(ys) + 1e-300)
        guess_y = np.clip(ys - c0, 1e-300, None)
    else:
        c0 = 0.0
        guess_y = ys
    slope, icpt = np.polyfit(np.log(data.x), np.log(guess_y), 1)
    alpha0 = float(np.clip(slope, 0.1, 9.0))
    spec = power_law(with_offset=with_offset)
    init = [math.exp(icpt), alpha0] + ([c0] if with_offset else [])
    lower = list(spec.lower)
    upper = list(spec.upper)
    scaled = Dataset(data.x, ys, data.sigma, dict(data.meta), data.unweighted)
    res = fit_model(spec.with_bounds(lower, upper, init), scaled, n_starts=n_starts, seed=seed)
    return res.params["exponent"], res.stderr["exponent"]


def aicc(result: FitResult) -> float:
    """Second-order (small-sample) Akaike criterion.

    Weighted data: ``AIC = chi2 + 2k``; unweighted data (unit sigma):
    ``AIC = n ln(RSS/n) + 2k``.  Both add ``2k(k+1)/(n-k-1)``.
    """
    n, k = result.n_points, result.n_params
    if result.unweighted:
        rss = max(result.chi2, 1e-300)
        aic = n * math.log(rss / n) + 2 * k
    else:
        aic = result.chi2 + 2 * k
    if n - k - 1 <= 0:
        return math.inf
    return aic + 2 * k * (k + 1) / (n - k - 1)


@dataclass
class RankedModel:
    model_id: str
    criterion: float
    delta: float
    result: FitResult


@dataclass
class ComparisonReport:
    ranking: list[RankedModel]
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def best(self) -> RankedModel:
        return self.ranking[0]

    def delta(self, model_id: str) -> float:
        for r in self.ranking:
            if r.model_id == model_id:
                return r.delta
        raise KeyError(model_id)

    def to_dict(self) -> dict:
        return {
            "criterion": "AICc",
            "ranking": [
                {"model": r.model_id, "aicc": r.criterion, "delta": r.delta, "fit": r.result.to_dict()}
                for r in self.ranking
            ],
            "failures": dict(self.failures),
        }


def compare_models(specs: list[ModelSpec], data: Dataset, *, n_starts: int = 8, seed: int = 0) -> ComparisonReport:
    """Fit every spec to ``data`` and rank by AICc (lowest first).

    A spec whose fit fails is recorded in ``failures`` and skipped.  Model
    ids must be distinct.
    """
    if not specs:
        raise UsageError("compare_models needs at least one model")
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise UsageError(f"duplicate model ids: {ids}")
    rows: list[tuple[str, float, FitResult]] = []
    failures: dict[str, str] = {}
    for spec in specs:
        try:
            res = fit_model(spec, data, n_starts=n_starts, seed=seed)
        except PhonolibError as exc:
            failures[spec.id] = f"{type(exc).__name__}: {exc}"
            continue
        rows.append((spec.id, aicc(res), res))
    if not rows:
        raise FitError("every model fit failed: " + "; ".join(f"{k}: {v}" for k, v in failures.items()))
    rows.sort(key=lambda r: r[1])
    best = rows[0][1]
    return ComparisonReport([RankedModel(i, c, c - best, r) for i, c, r in rows], failures)
