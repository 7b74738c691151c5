"""Registry-wide checks: analytic Jacobians and noiseless round trips."""

import numpy as np
import pytest

from phonolib.fit import REGISTRY, Dataset, fit_model, get_model
from phonolib.io import load_expansion_table
from phonolib.shifts import ExpansionModel

EXPANSION = ExpansionModel(1.0, 442.0, load_expansion_table())

# model id -> (factory kwargs, x grid, true parameters)
CASES = {
    "linear": ({}, np.linspace(0, 10, 12), [1.0, 2.0]),
    "power_law": ({}, np.linspace(1, 10, 12), [5.0, 3.0]),
    "power_law+offset": ({"with_offset": True}, np.linspace(1, 10, 12), [5.0, 2.5, -3.0]),
    "power_law[3]": ({"exponent": 3.0}, np.linspace(1, 10, 12), [0.7]),
    "offset_cubic": ({}, np.linspace(70, 350, 30), [103.0, 0.12]),
    "bose_t1": ({}, np.linspace(5, 30, 26), [0.0099, 50.0, 2.26]),
    "mott_seitz": ({}, np.linspace(5, 350, 40), [1.7, 3.3, 55.0]),
    "splitting_t2": ({}, np.linspace(5, 300, 20), [50.0, 1e-4]),
    "line_shift_quadrature": ({}, np.linspace(20, 350, 20), [0.1, -2.0]),
    "thermal_expansion": ({"model": EXPANSION}, np.linspace(20, 350, 20), [0.1, -0.5]),
    "lorentzian_multi": ({"n_peaks": 2}, np.linspace(-100, 100, 81), [-20.0, 10.0, 5.0, 25.0, 15.0, 3.0]),
    "lorentzian_multi+baseline": (
        {"n_peaks": 1, "baseline": True},
        np.linspace(-60, 60, 61),
        [3.0, 12.0, 2.0, 0.01],
    ),
    "exp_recovery": ({}, np.linspace(0, 200, 40), [1.0, 0.2, 39.0]),
    "linewidth": ({}, np.linspace(4, 350, 30), [91.7, 12.9, 498.0]),
}


def spec_for(case):
    model_id = case.split("+")[0].split("[")[0]
    return get_model(model_id, **CASES[case][0])


def test_every_registered_model_is_covered():
    assert {c.split("+")[0].split("[")[0] for c in CASES} == set(REGISTRY)


def central_difference(spec, x, p, rel=1e-6):
    """Central differences in extended precision.

    At a 1e-6 relative step float64 cancellation alone costs ~1e-5 when the
    model value dwarfs one column's contribution (the offset of a T^3 law
    at 350 K), so parameters and differences are carried as long doubles.
    """
    cols = []
    p = np.asarray(p, dtype=np.longdouble)
    for i in range(len(p)):
        h = np.longdouble(rel) * max(abs(p[i]), np.longdouble(1e-8))
        up, dn = p.copy(), p.copy()
        up[i] += h
        dn[i] -= h
        cols.append((spec.func(x, up) - spec.func(x, dn)) / (up[i] - dn[i]))
    return np.column_stack(cols).astype(float)


@pytest.mark.parametrize("case", sorted(CASES))
def test_jacobian_matches_finite_differences(case, rng):
    spec = spec_for(case)
    _, x, p = CASES[case]
    for _ in range(3):
        q = np.array(p) * rng.uniform(0.9, 1.1, len(p))
        ja = spec.jacobian(x, q)
        jn = central_difference(spec, x, q)
        scale = np.max(np.abs(jn), axis=0)
        assert np.all(np.abs(ja - jn) <= 1e-6 * scale + 1e-300), case


@pytest.mark.parametrize("case", sorted(CASES))
def test_noiseless_round_trip(case):
    spec = spec_for(case)
    _, x, p = CASES[case]
    y = spec(x, p)
    init = np.array(p) * 1.2 + np.where(np.array(p) == 0, 0.1, 0.0)
    res = fit_model(spec, Dataset(x, y, np.full_like(y, 1e-3 * np.abs(y).max())), init=init)
    assert res.converged
    np.testing.assert_allclose(res.values, p, rtol=1e-6, atol=1e-12)
