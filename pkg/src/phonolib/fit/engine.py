"""Weighted nonlinear least squares (damped Gauss-Newton / Levenberg-Marquardt).

The damping term is ``mu * diag(J^T J)`` (Marquardt scaling), which makes
the iteration invariant under rescaling of individual parameters.  ``mu``
starts at 1e-3, is multiplied by 3 after a rejected step and halved after
an accepted one.  Steps are solved as an augmented least-squares problem
rather than through the normal equations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from ..errors import FitError, UsageError
from .dataset import Dataset
from .models import ModelSpec

MAX_ITER = 500
COST_RTOL = 1e-10
STEP_RTOL = 1e-12
MU_INIT = 1e-3
MU_UP = 3.0
MU_DOWN = 2.0
ILL_CONDITIONED = 1e10


@dataclass
class FitResult:
    model_id: str
    names: tuple[str, ...]
    values: np.ndarray
    covariance: np.ndarray
    chi2: float
    reduced_chi2: float
    n_points: int
    n_iter: int
    converged: bool
    unweighted: bool = False
    at_bound: bool = False
    condition_number: float = 1.0
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def params(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.values)))

    @property
    def stderr(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, np.sqrt(np.clip(np.diag(self.covariance), 0, None)))))

    @property
    def n_params(self) -> int:
        return len(self.names)

    @property
    def ill_conditioned(self) -> bool:
        return self.condition_number > ILL_CONDITIONED

    def correlation(self) -> np.ndarray:
        return _correlation(self.covariance)

    def to_dict(self) -> dict:
        return {
            "model": self.model_id,
            "params": self.params,
            "stderr": self.stderr,
            "covariance": self.covariance.tolist(),
            "chi2": self.chi2,
            "reduced_chi2": self.reduced_chi2,
            "n_points": self.n_points,
            "n_iter": self.n_iter,
            "converged": self.converged,
            "unweighted": self.unweighted,
            "at_bound": self.at_bound,
            "condition_number": self.condition_number,
        }


def _correlation(cov: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.clip(np.diag(cov), 1e-300, None))
    return cov / np.outer(d, d)


@dataclass
class _Run:
    params: np.ndarray
    cost: float
    n_iter: int
    converged: bool
    at_bound: bool


def _cost(r: np.ndarray) -> float:
    c = float(r @ r)
    return c if math.isfinite(c) else math.inf


def levenberg_marquardt(spec: ModelSpec, x, y, sigma, p0, lower, upper, max_iter: int = MAX_ITER) -> _Run:
    """Minimise ``sum(((y - f(x; p)) / sigma)**2)`` from ``p0`` inside the box."""
    p = np.clip(np.asarray(p0, dtype=float), lower, upper)
    at_bound = bool(np.any(p != np.asarray(p0, dtype=float)))
    r = (y - spec(x, p)) / sigma
    cost = _cost(r)
    if not math.isfinite(cost):
        return _Run(p, math.inf, 0, False, at_bound)
    mu = MU_INIT
    converged = False
    it = 0
    jac = spec.jacobian(x, p) / sigma[:, None]
    while it < max_iter:
        if not np.all(np.isfinite(jac)):
            # derivative undefined here (e.g. log of a negative abscissa)
            break
        it += 1
        if cost == 0.0:
            converged = True
            break
        diag = np.einsum("ij,ij->j", jac, jac)
        diag = np.where(diag > 0, diag, 1.0)
        aug = np.vstack([jac, np.diag(np.sqrt(mu * diag))])
        rhs = np.concatenate([r, np.zeros(len(p))])
        step = np.linalg.lstsq(aug, rhs, rcond=None)[0]
        trial = np.clip(p + step, lower, upper)
        clipped = bool(np.any(trial != p + step))
        r_new = (y - spec(x, trial)) / sigma
        cost_new = _cost(r_new)
        step_norm = float(np.linalg.norm(trial - p))
        if cost_new < cost:
            rel = (cost - cost_new) / cost
            p, r, cost = trial, r_new, cost_new
            at_bound = at_bound or clipped
            mu /= MU_DOWN
            if rel < COST_RTOL or step_norm <= STEP_RTOL * (np.linalg.norm(p) + STEP_RTOL):
                converged = True
                break
            jac = spec.jacobian(x, p) / sigma[:, None]
        else:
            mu *= MU_UP
            if step_norm <= STEP_RTOL * (np.linalg.norm(p) + STEP_RTOL) or mu > 1e20:
                # no descent possible at this resolution: stationary point
                converged = True
                break
    return _Run(p, cost, it, converged, at_bound)


def _starts(spec_init, lower, upper, n_starts: int, seed: int) -> list[np.ndarray]:
    starts = [np.asarray(spec_init, dtype=float)]
    if n_starts <= 0:
        return starts
    sampler = qmc.LatinHypercube(d=len(spec_init), seed=seed)
    u = sampler.random(n_starts)
    init = np.asarray(spec_init, dtype=float)
    for row in u:
        s = np.empty_like(init)
        for i, ui in enumerate(row):
            lo, hi = lower[i], upper[i]
            if math.isfinite(lo) and math.isfinite(hi):
                s[i] = lo + ui * (hi - lo)
            else:
                scale = abs(init[i]) if init[i] != 0 else 1.0
                s[i] = np.clip(init[i] + (2 * ui - 1) * 0.5 * scale, lo, hi)
        starts.append(s)
    return starts


def fit_model(
    spec: ModelSpec,
    data: Dataset,
    init=None,
    bounds=None,
    *,
    n_starts: int = 8,
    seed: int = 0,
    max_iter: int = MAX_ITER,
    check_conditioning: bool = True,
    workers: int = 1,
) -> FitResult:
    """Fit ``spec`` to ``data`` by weighted least squares.

    ``init`` and ``bounds`` (a ``(lower, upper)`` pair) default to the
    model's own.  Besides ``init``, ``n_starts`` Latin-hypercube starts are
    drawn inside the bounds (deterministically from ``seed``) and the lowest
    cost wins.  An initial guess outside the bounds is projected onto them
    and the result is flagged ``at_bound``.

    The covariance is ``(J^T W J)^{-1}`` at the optimum, scaled by the
    reduced chi^2.

    ``workers > 1`` runs the starts on a thread pool.  The winner is chosen
    in start order (ties go to the earlier start), so the result does not
    depend on ``workers``.

    Raises
    ------
    UsageError
        Too few data points.
    FitError
        The normal matrix is singular; the message lists the most strongly
        correlated parameter pair.
    """
    n, p = len(data), spec.n_params
    if n < max(4, p + 1):
        raise UsageError(f"need at least {max(4, p + 1)} points to fit {p} parameters, got {n}")
    init = np.asarray(spec.initial if init is None else init, dtype=float)
    lower, upper = (spec.lower, spec.upper) if bounds is None else bounds
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if init.shape != (p,) or lower.shape != (p,) or upper.shape != (p,):
        raise UsageError("init/bounds do not match the model's parameter count")
    if np.any(lower > upper):
        raise UsageError("lower bound exceeds upper bound")
    projected = bool(np.any((init < lower) | (init > upper)))

    def solve(s):
        return levenberg_marquardt(spec, data.x, data.y, data.sigma, s, lower, upper, max_iter)

    starts = _starts(init, lower, upper, n_starts, seed)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(solve, starts))
    else:
        runs = [solve(s) for s in starts]
    best: _Run | None = None
    for run in runs:
        if best is None or run.cost < best.cost:
            best = run
    assert best is not None
    if not math.isfinite(best.cost):
        raise FitError(f"{spec.id}: model is not finite at any start point")

    jac = spec.jacobian(data.x, best.params) / data.sigma[:, None]
    if not np.all(np.isfinite(jac)):
        raise FitError(f"{spec.id}: Jacobian is not finite at the optimum")
    normal = jac.T @ jac
    scale = np.sqrt(np.clip(np.diag(normal), 1e-300, None))
    scaled = normal / np.outer(scale, scale)
    cond = float(np.linalg.cond(scaled))
    dof = n - p
    red = best.cost / dof
    if not math.isfinite(cond) or cond > 1e14:
        if check_conditioning:
            names, pair, rho = _worst_pair(spec.param_names, scaled)
            raise FitError(
                f"{spec.id}: singular normal matrix (condition {cond:.3g}); "
                f"{pair[0]} and {pair[1]} correlated at {rho:+.6f}",
                correlation=scaled,
                names=names,
            )
        cov = np.full((p, p), np.inf)
    else:
        cov = np.linalg.inv(scaled) / np.outer(scale, scale) * red
        cov = 0.5 * (cov + cov.T)
    return FitResult(
        model_id=spec.id,
        names=spec.param_names,
        values=best.params,
        covariance=cov,
        chi2=best.cost,
        reduced_chi2=red,
        n_points=n,
        n_iter=best.n_iter,
        converged=best.converged,
        unweighted=data.unweighted,
        at_bound=best.at_bound or projected,
        condition_number=cond,
    )


def _worst_pair(names, scaled_normal):
    try:
        corr = _correlation(np.linalg.pinv(scaled_normal))
    except np.linalg.LinAlgError:
        corr = scaled_normal
    c = np.abs(corr - np.eye(len(names)))
    i, j = sorted(np.unravel_index(np.argmax(c), c.shape))
    return tuple(names), (names[i], names[j]), float(corr[i, j])
