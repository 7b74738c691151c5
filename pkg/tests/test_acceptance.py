"""Acceptance criteria 1-9, one test each.

Every test prints a single ``[criterion N] PASS|FAIL`` line with the
measured numbers, the pinned tolerance and the runtime; the lines are
repeated in the pytest terminal summary.
"""

import math
import time
import warnings

import numpy as np
import pytest
from oracles import line_shift_riemann
from scipy.optimize import brentq

from phonolib import ValidityWarning
from phonolib import presets
from phonolib.dynamics import peak_height_recovery, siv_lambda_preset, steady_state_contrast
from phonolib.fit import Dataset, compare_models, fit_model, get_model, power_law_exponent
from phonolib.io import load_expansion_table
from phonolib.rates import coherence_budget
from phonolib.shifts import ExpansionModel, MottSeitzParams, line_shift_integral, mott_seitz_lifetime, splitting_shift_parts
from phonolib.spectra import FineStructure, SpectralModels, count_resolvable_peaks, synthesize_spectrum
from phonolib.doublet import OrbitalDoublet
from phonolib.units import PhononBath


class Criterion:
    """Times a block and reports it once checks are collected."""

    def __init__(self, number, limit_s, report):
        self.number, self.limit, self.report = number, limit_s, report
        self.checks: list[tuple[str, bool]] = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, text, ok):
        self.checks.append((text, bool(ok)))

    def __exit__(self, *exc):
        dt = time.perf_counter() - self.t0
        self.check(f"runtime {dt:.2f} s < {self.limit:g} s", dt < self.limit)
        ok = exc[0] is None and all(c for _, c in self.checks)
        detail = "; ".join(f"{t}{'' if c else ' [x]'}" for t, c in self.checks)
        self.report(f"[criterion {self.number}] {'PASS' if ok else 'FAIL'}: {detail}")
        return False

    def assert_all(self):
        failed = [t for t, c in self.checks if not c]
        assert not failed, failed


def budget(deltas, temps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return coherence_budget(presets.budget_bath(), deltas, temps, presets.BUDGET_CALIBRATION)


def test_criterion_1_budget(acceptance_report):
    with Criterion(1, 1.0, acceptance_report) as c:
        r1, r026 = budget([50.0], [1.0, 0.26])
        c.check(f"1/gamma_up(1 K) = {r1.inv_gamma_up / 1e3:.4f} us vs 1.01 +/- 5%",
                abs(r1.inv_gamma_up / 1010.0 - 1) <= 0.05)
        c.check(f"1/gamma_up(0.26 K) = {r026.inv_gamma_up / 1e6:.4f} ms vs 1.03 +/- 5%",
                abs(r026.inv_gamma_up / 1.03e6 - 1) <= 0.05)
    c.assert_all()


def test_criterion_2_strain(acceptance_report):
    with Criterion(2, 1.0, acceptance_report) as c:
        (row,) = budget([1600.0], [4.0])
        ratio = row.inv_gamma_up / 1e6
        c.check(f"1/gamma_up(1.6 THz, 4 K) = {ratio:.4f} ms, within x2.5 of 1 ms", 1 / 2.5 <= ratio <= 2.5)
    c.assert_all()


def _linewidth_fit():
    lo = np.arange(4.0, 20.5, 1.0)
    hi = np.arange(70.0, 351.0, 10.0)
    x = np.concatenate([lo, hi])
    y = np.concatenate([presets.linear_law(lo), presets.cubic_law(hi)])
    spec = get_model("linewidth")
    res = fit_model(spec, Dataset(x, y, 0.05 * y))
    return spec, res


def test_criterion_3_linewidth_shape(acceptance_report):
    with Criterion(3, 5.0, acceptance_report) as c:
        spec, res = _linewidth_fit()

        def gamma(t):
            return spec(np.atleast_1d(np.asarray(t, dtype=float)), res.values)

        def loglog(a, b):
            t = np.linspace(a, b, 41)
            return np.polyfit(np.log(t), np.log(gamma(t)), 1)[0]

        def local_slope(t, h=1e-4):
            num = np.log(gamma(t * (1 + h))) - np.log(gamma(t * (1 - h)))
            return float(num[0]) / (math.log1p(h) - math.log1p(-h))

        s_lo, s_hi = loglog(5, 15), loglog(100, 350)
        # crossover: local log-log slope halfway between the two regimes
        cross = brentq(lambda t: local_slope(t) - 2.0, 5.0, 100.0)
        c.check(f"slope 5-15 K = {s_lo:.3f} vs 1.0 +/- 0.1", abs(s_lo - 1.0) <= 0.1)
        c.check(f"slope 100-350 K = {s_hi:.3f} vs 3.0 +/- 0.1", abs(s_hi - 3.0) <= 0.1)
        c.check(f"crossover {cross:.2f} K in [20, 70] K", 20.0 <= cross <= 70.0)
    c.assert_all()


def test_criterion_4_pump_probe(acceptance_report):
    with Criterion(4, 10.0, acceptance_report) as c:
        rec = peak_height_recovery(siv_lambda_preset(39.0), np.linspace(0, 200, 81))
        c.check(f"refit T1 = {rec.t1:.6f} ns vs 39.0 +/- 0.1", abs(rec.t1 - 39.0) <= 0.1)
        temps = np.linspace(4.5, 22.0, 8)
        pts = steady_state_contrast(siv_lambda_preset(), temps, presets.T1_FIT)
        contrast = [p.contrast for p in pts]
        mono = all(b <= a for a, b in zip(contrast, contrast[1:]))
        c.check(
            f"contrast 1 - h(0)/2a = {contrast[0]:.3f} (4.5 K) .. {contrast[-1]:.3f} (22 K), non-increasing", mono
        )
    c.assert_all()


def test_criterion_5_mott_seitz(acceptance_report):
    with Criterion(5, 10.0, acceptance_report) as c:
        ratio = mott_seitz_lifetime(MottSeitzParams(1.0, 3.3, 55.0), 300.0)
        c.check(f"tau(300 K)/tau(0) = {ratio:.5f} vs 0.718 +/- 0.001", abs(ratio - 0.718) <= 0.001)
        x = np.arange(5.0, 350.5, 1.0)
        spec = get_model("mott_seitz")
        y0 = spec(x, [1.7, 3.3, 55.0])
        est, err = [], []
        for seed in range(100):
            r = np.random.default_rng(seed)
            res = fit_model(spec, Dataset(x, y0 + r.normal(0, 0.03 * y0), 0.03 * y0))
            est.append(res.params["activation"])
            err.append(res.stderr["activation"])
        est, err = np.array(est), np.array(err)
        cover = float(np.mean(np.abs(est - 55.0) <= err))
        c.check(f"mean 1-sigma on dE = {err.mean():.2f} meV <= 2", err.mean() <= 2.0)
        c.check(f"scatter of dE = {est.std():.2f} meV <= 2", est.std() <= 2.0)
        c.check(f"1-sigma coverage {cover:.2f} in [0.61, 0.75]", 0.61 <= cover <= 0.75)
    c.assert_all()


def test_criterion_6_line_shift_quadrature(acceptance_report):
    with Criterion(6, 30.0, acceptance_report) as c:
        rng = np.random.default_rng(6)
        worst = 0.0
        for _ in range(20):
            chi, t, theta = 10 ** rng.uniform(-10, -7), rng.uniform(5, 400), rng.uniform(1000, 3000)
            got = -2 * chi * line_shift_integral(t, theta)
            ref = -2 * chi * line_shift_riemann(t, theta)
            worst = max(worst, abs(got / ref - 1))
        c.check(f"max rel. deviation from 1e6-point Riemann = {worst:.2e} < 1e-8", worst < 1e-8)
        t = np.linspace(50, 350, 31)
        s = np.array([line_shift_integral(v, 2230.0) for v in t])
        k, dk = power_law_exponent(Dataset(t, s))
        c.check(f"free exponent 50-350 K = {k:.3f} +/- {dk:.3f} in [2.7, 3.1]", 2.7 <= k <= 3.1)
    c.assert_all()


def test_criterion_7_splitting_and_discrimination(acceptance_report):
    with Criterion(7, 60.0, acceptance_report) as c:
        d = OrbitalDoublet(50.0)
        t = np.linspace(20, 300, 30)
        thermal = np.array([splitting_shift_parts(d, PhononBath(1e-9, v)).thermal for v in t])
        k, _ = power_law_exponent(Dataset(t, thermal))
        c.check(f"splitting exponent = {k:.6f} vs 2.00 +/- 0.02", abs(k - 2.0) <= 0.02)
        exp = ExpansionModel(1.0, 442.0, load_expansion_table())
        specs = [get_model("line_shift_quadrature"), get_model("thermal_expansion", model=exp)]
        x = np.linspace(20, 350, 34)
        y = 1e-9 * x**3
        sigma = np.full(x.size, 0.01 * y.max())
        wins = 0
        for seed in range(100):
            r = np.random.default_rng(seed)
            rep = compare_models(specs, Dataset(x, y + r.normal(0, sigma), sigma), n_starts=0)
            wins += rep.best.model_id == "line_shift_quadrature" and rep.ranking[1].delta > 10
        c.check(f"quadrature over expansion with dAICc > 10 in {wins}/100 seeds (>= 95)", wins >= 95)
    c.assert_all()


def test_criterion_8_peak_merging(acceptance_report):
    with Criterion(8, 5.0, acceptance_report) as c:
        fs, models = FineStructure(), SpectralModels()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            for temp, want in ((10.0, 4), (90.0, 2), (150.0, 1)):
                n = count_resolvable_peaks(synthesize_spectrum(fs, models, temp))
                c.check(f"{n} peaks at {temp:g} K (want {want})", n == want)
    c.assert_all()


def test_criterion_9_property_suites(acceptance_report):
    from phonolib.dynamics import evolve
    from phonolib.rates import single_phonon_rates
    from phonolib.units import thermal_ratio
    from test_fit_models import CASES, central_difference, spec_for
    from test_fit_engine import coverage

    with Criterion(9, 300.0, acceptance_report) as c:
        rng = np.random.default_rng(9)
        db = 0.0
        for _ in range(500):
            delta, temp = rng.uniform(1, 2000), rng.uniform(0.5, 400)
            r = single_phonon_rates(OrbitalDoublet(delta), PhononBath(1e-9, temp, 1e5))
            if r.gamma_up > 0:
                db = max(db, abs(r.gamma_down / r.gamma_up / thermal_ratio(delta, temp) - 1))
        c.check(f"detailed balance {db:.1e} <= 1e-10", db <= 1e-10)

        drift = 0.0
        for on in (False, True):
            p = evolve(siv_lambda_preset(), [0.0, 1.0, 0.0], 1e6, laser_on=on)
            drift = max(drift, abs(p.sum() - 1))
        c.check(f"probability drift over 1e6 ns {drift:.1e} <= 1e-12", drift <= 1e-12)

        jac_worst, trip_worst = 0.0, 0.0
        for case in sorted(CASES):
            spec = spec_for(case)
            _, x, p = CASES[case]
            ja, jn = spec.jacobian(x, p), central_difference(spec, x, p)
            jac_worst = max(jac_worst, float(np.max(np.abs(ja - jn) / np.max(np.abs(jn), axis=0))))
            y = spec(x, p)
            res = fit_model(spec, Dataset(x, y, np.full_like(y, 1e-3 * np.abs(y).max())), init=np.array(p) * 1.2)
            trip_worst = max(trip_worst, float(np.max(np.abs(res.values / np.array(p) - 1))))
        c.check(f"Jacobian vs central differences {jac_worst:.1e} <= 1e-6", jac_worst <= 1e-6)
        c.check(f"noiseless round trips {trip_worst:.1e} <= 1e-6", trip_worst <= 1e-6)

        x = np.linspace(70, 350, 30)
        frac = coverage(get_model("offset_cubic"), x, np.array([103.0, 0.12]), np.full(x.size, 5.0), range(400))
        c.check(f"1-sigma coverage {frac.round(3).tolist()} in [0.61, 0.75]", np.all((frac >= 0.61) & (frac <= 0.75)))
    c.assert_all()
