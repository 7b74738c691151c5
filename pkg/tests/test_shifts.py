import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import line_shift_riemann

from phonolib import DomainError, OrbitalDoublet, PhononBath
from phonolib.fit import Dataset, fit_model, get_model, power_law_exponent
from phonolib.io import load_expansion_table
from phonolib.shifts import (
    ExpansionModel,
    MottSeitzParams,
    line_position_shift,
    line_position_static,
    line_shift_integral,
    mott_seitz_lifetime,
    splitting_shift,
    splitting_shift_parts,
    thermal_expansion_shift,
)

# mpmath: 1 / (1 + 3.3 exp(-55 meV / k_B 300 K))
MS_RATIO_300K = 0.717799510036652620
# mpmath: int_0^{2230/T} (g(u) - 2) u^2 du
J_OF_UPPER = {
    2230 / 300: -1.68634109357602475,
    2230 / 100: -1.77150842996601120,
    2230 / 10: -1.77150865475452860,
}


def bath(t, chi=1e-9, debye=2230.0):
    return PhononBath(chi, t, debye)


class TestSplittingShift:
    def test_quadratic_ratio(self):
        d = OrbitalDoublet(50.0)
        s0, s1, s2 = (splitting_shift(d, bath(t)) for t in (0.0, 30.0, 60.0))
        assert (s2 - s0) / (s1 - s0) == pytest.approx(4.0, rel=1e-14)

    @given(st.floats(1.0, 100.0), st.floats(0.0, 400.0))
    def test_relative_shift_independent_of_splitting(self, delta, t):
        b = bath(t)
        ref = splitting_shift(OrbitalDoublet(1.0), b)
        assert splitting_shift(OrbitalDoublet(delta), b) / delta == pytest.approx(ref, rel=1e-12)

    @given(st.one_of(st.just(0.0), st.floats(1e-3, 400.0)))
    def test_always_negative(self, t):
        parts = splitting_shift_parts(OrbitalDoublet(50.0), bath(t))
        assert parts.total < 0
        assert parts.thermal <= 0
        assert (parts.thermal == 0) == (t == 0)

    def test_refit_exponent(self, rng):
        d = OrbitalDoublet(50.0)
        t = np.linspace(20, 300, 30)
        thermal = np.array([splitting_shift_parts(d, bath(x)).thermal for x in t])
        noise = 0.01 * np.abs(thermal).max()
        y = thermal + rng.normal(0, noise, t.size)
        k, dk = power_law_exponent(Dataset(t, y, np.full(t.size, noise)))
        assert k == pytest.approx(2.0, abs=0.05)
        assert dk < 0.05


class TestLinePosition:
    def test_zero_temperature(self):
        assert line_position_shift(bath(0.0)) == 0.0
        assert line_shift_integral(0.0, 2230.0) == 0.0

    def test_mpmath_values(self):
        for upper, val in J_OF_UPPER.items():
            t = 2230.0 / upper
            expect = (t * 20.8366191233) ** 3 * val
            assert line_shift_integral(t, 2230.0) == pytest.approx(expect, rel=1e-9)

    def test_riemann_oracle(self):
        for t, theta in ((10.0, 2230.0), (77.0, 1860.0), (300.0, 2230.0)):
            assert line_shift_integral(t, theta) == pytest.approx(line_shift_riemann(t, theta), rel=1e-8)

    def test_cubic_slope_low_temperature(self):
        t = np.linspace(10, 100, 20)
        s = np.array([line_position_shift(bath(x)) for x in t])
        assert np.polyfit(np.log(t), np.log(np.abs(s)), 1)[0] == pytest.approx(3.0, abs=0.05)

    def test_free_exponent_over_measured_range(self):
        t = np.linspace(50, 350, 31)
        s = np.array([line_shift_integral(x, 2230.0) for x in t])
        k, _ = power_law_exponent(Dataset(t, s))
        assert 2.7 <= k <= 3.1

    def test_static_part(self):
        b = bath(0.0)
        assert line_position_static(b) < 0
        assert line_position_static(b) == line_position_static(bath(300.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            line_shift_integral(-1.0, 2230.0)

    def _calibrated(self):
        t = np.linspace(100, 350, 26)
        data = 19.2 * t**2.78
        s = np.array([line_shift_integral(x, 2230.0) for x in t])
        model = s * data[-1] / s[-1]
        return data, model

    @pytest.mark.xfail(strict=True, reason="T^2.78 and the quadrature shape differ by 17% at 100 K; see ledger")
    def test_power_law_residual_pointwise(self):
        data, model = self._calibrated()
        assert np.max(np.abs(model - data) / data) < 0.05

    def test_power_law_residual_full_scale(self):
        data, model = self._calibrated()
        assert np.max(np.abs(model - data)) / data.max() < 0.05


def cubic_table(c=1e-12, t_max=400.0):
    t = np.linspace(0, t_max, 41)
    return t, c * t**3


class TestThermalExpansion:
    def test_cubic_toy_table(self):
        m = ExpansionModel(1.0, 442.0, cubic_table())
        for t in (0.0, 13.0, 155.5, 400.0):
            expect = -442.0 * 1e-12 * t**4 / 4
            assert m.pressure(t) == pytest.approx(expect, rel=1e-9, abs=1e-300)

    def test_linear_in_coefficient(self):
        m = ExpansionModel(0.7, 442.0, cubic_table())
        assert thermal_expansion_shift(m.with_pressure_coeff(1.4), 200.0) == 2 * thermal_expansion_shift(m, 200.0)
        assert thermal_expansion_shift(m, 0.0) == 0.0

    def test_pressure_decreasing(self):
        m = ExpansionModel(1.0, 442.0, load_expansion_table())
        p = m.pressure(np.linspace(0, 500, 101))
        assert p[0] == 0.0
        assert np.all(np.diff(p) <= 0)

    def test_outside_table(self):
        m = ExpansionModel(1.0, 442.0, cubic_table())
        with pytest.raises(DomainError):
            m.pressure(401.0)
        with pytest.raises(DomainError):
            m.pressure(-1.0)

    @pytest.mark.parametrize(
        "table,b",
        [
            ((np.array([0, 1, 1, 2.0]), np.ones(4)), 1.0),
            ((np.array([0, 1, 2, 3.0]), np.array([0, 1, -1, 0.0])), 1.0),
            ((np.array([1, 2, 3, 4.0]), np.ones(4)), 1.0),
            (cubic_table(), 0.0),
        ],
    )
    def test_invariants(self, table, b):
        with pytest.raises(DomainError):
            ExpansionModel(1.0, b, table)


class TestMottSeitz:
    p = MottSeitzParams(1.7, 3.3, 55.0)

    def test_room_temperature_ratio(self):
        assert mott_seitz_lifetime(self.p, 300.0) / self.p.tau0 == pytest.approx(MS_RATIO_300K, rel=1e-12)
        assert mott_seitz_lifetime(self.p, 300.0) / self.p.tau0 == pytest.approx(0.7179, abs=5e-4)

    def test_zero_temperature(self):
        assert mott_seitz_lifetime(self.p, 0.0) == self.p.tau0

    @given(st.floats(0.0, 1e5))
    def test_no_channel(self, t):
        assert mott_seitz_lifetime(MottSeitzParams(2.0, 0.0, 55.0), t) == 2.0

    def test_monotone_and_bounded(self):
        t = np.concatenate([[0.0], np.geomspace(1, 1e7, 200)])
        tau = mott_seitz_lifetime(self.p, t)
        assert np.all(np.diff(tau) <= 0)
        assert np.all(np.diff(tau[t > 100]) < 0)
        assert np.all(tau >= self.p.tau0 / (1 + self.p.alpha))
        assert tau[-1] == pytest.approx(self.p.tau0 / (1 + self.p.alpha), rel=1e-3)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -0.1, 1.0), (1.0, 1.0, 0.0)])
    def test_invariants(self, args):
        with pytest.raises(DomainError):
            MottSeitzParams(*args)

    def test_negative_temperature(self):
        with pytest.raises(DomainError):
            mott_seitz_lifetime(self.p, -1.0)


def test_quadrature_beats_expansion_on_cubic_data(rng):
    t = np.linspace(20, 350, 34)
    y = 1e-9 * t**3
    # 1% of full scale, comparable to the scatter of measured line positions
    sigma = 0.01 * y.max()
    data = Dataset(t, y + rng.normal(0, sigma, t.size), np.full(t.size, sigma))
    quad = fit_model(get_model("line_shift_quadrature"), data)
    exp = fit_model(get_model("thermal_expansion", model=ExpansionModel(1.0, 442.0, load_expansion_table())), data)
    assert exp.reduced_chi2 > 5 * quad.reduced_chi2
    assert math.isfinite(quad.reduced_chi2)
