import math

import numpy as np
import pytest

from phonolib import DomainError, UsageError
from phonolib.fit import Dataset, aicc, compare_models, fit_model, get_model, power_law_exponent
from phonolib.fit.models import power_law
from phonolib.io import load_expansion_table
from phonolib.shifts import ExpansionModel

EXPANSION = ExpansionModel(1.0, 442.0, load_expansion_table())


class TestPowerLawExponent:
    def test_exact_cubic(self):
        x = np.linspace(1, 10, 12)
        k, dk = power_law_exponent(Dataset(x, 5 * x**3))
        assert k == pytest.approx(3.0, abs=1e-6)

    def test_negative_series(self):
        x = np.linspace(1, 10, 12)
        k, _ = power_law_exponent(Dataset(x, -2 * x**1.5))
        assert k == pytest.approx(1.5, abs=1e-6)

    def test_with_offset(self):
        x = np.linspace(1, 10, 15)
        k, _ = power_law_exponent(Dataset(x, 7 - 0.3 * x**2.2), with_offset=True)
        assert k == pytest.approx(2.2, abs=1e-6)

    def test_sign_mixed(self):
        x = np.linspace(1, 10, 12)
        with pytest.raises(DomainError):
            power_law_exponent(Dataset(x, x - 5))

    def test_needs_six_points(self):
        with pytest.raises(UsageError):
            power_law_exponent(Dataset(np.arange(1.0, 6.0), np.arange(1.0, 6.0)))

    def test_noisy_uncertainty(self, rng):
        x = np.linspace(10, 100, 30)
        y = 0.01 * x**3
        s = 0.02 * y
        k, dk = power_law_exponent(Dataset(x, y + rng.normal(0, s), s))
        assert abs(k - 3) < 4 * dk
        assert 0 < dk < 0.05


def test_aicc_formulas():
    x = np.arange(10.0)
    rng = np.random.default_rng(1)
    y = x + rng.normal(0, 0.1, x.size)
    w = fit_model(get_model("linear"), Dataset(x, y, np.full(x.size, 0.1)))
    assert aicc(w) == pytest.approx(w.chi2 + 4 + 12 / 7)
    u = fit_model(get_model("linear"), Dataset(x, y))
    assert aicc(u) == pytest.approx(10 * math.log(u.chi2 / 10) + 4 + 12 / 7)


def fixed_powers(ks=(2, 3, 4)):
    return [power_law(with_offset=True, exponent=k) for k in ks]


def cubic_data(seed, noise=0.01):
    x = np.linspace(20, 350, 34)
    y = 2.0 + 1e-6 * x**3
    s = noise * y.max()
    r = np.random.default_rng(seed)
    return Dataset(x, y + r.normal(0, s, x.size), np.full(x.size, s))


class TestCompareModels:
    def test_cubic_ranked_first(self):
        wins = 0
        for seed in range(100):
            rep = compare_models(fixed_powers(), cubic_data(seed), n_starts=0)
            others = [r.delta for r in rep.ranking[1:]]
            wins += rep.best.model_id == "power_law[3]" and min(others) > 10
        assert wins >= 95

    def test_expansion_data_prefers_expansion(self, rng):
        x = np.linspace(20, 500, 40)
        y = 0.2 + 0.5 * EXPANSION.pressure(x)
        s = 0.01 * np.abs(y).max()
        data = Dataset(x, y + rng.normal(0, s, x.size), np.full(x.size, s))
        rep = compare_models([get_model("thermal_expansion", model=EXPANSION)] + fixed_powers(), data)
        assert rep.best.model_id == "thermal_expansion"

    def test_single_spec(self):
        rep = compare_models([get_model("linear")], cubic_data(0))
        assert rep.best.model_id == "linear" and rep.best.delta == 0.0

    def test_duplicate_ids(self):
        with pytest.raises(UsageError):
            compare_models([get_model("linear"), get_model("linear")], cubic_data(0))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_failures_recorded(self):
        x = np.linspace(-5, 5, 11)
        data = Dataset(x, x**2 + 1)
        rep = compare_models([get_model("linear"), get_model("power_law")], data)
        assert "power_law" in rep.failures
        assert [r.model_id for r in rep.ranking] == ["linear"]

    def test_report_dict(self):
        d = compare_models(fixed_powers(), cubic_data(1), n_starts=0).to_dict()
        assert d["criterion"] == "AICc"
        assert [r["delta"] for r in d["ranking"]][0] == 0.0
