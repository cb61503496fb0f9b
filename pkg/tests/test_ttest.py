"""Student-t p-values against a numeric-integration oracle, and the binary
continuous match built on them."""

import math

import mpmath as mp
import pytest

from predintel.measure import pm_continuous, two_tailed_t_p
from predintel.types import ContinuousEnsemblePrediction, ValidationError

# two-tailed 5% critical value for df=4
T_CRIT_DF4 = 2.7764451051977987


def oracle_two_tailed(t, df):
    """Integrate the t density numerically; independent of the incomplete-beta
    route used by the implementation."""
    with mp.workdps(30):
        df_ = mp.mpf(df)
        norm = mp.gamma((df_ + 1) / 2) / (mp.sqrt(df_ * mp.pi) * mp.gamma(df_ / 2))

        def density(x):
            return norm * (1 + x * x / df_) ** (-(df_ + 1) / 2)

        return float(2 * mp.quad(density, [abs(mp.mpf(t)), mp.inf]))


class TestTwoTailedP:
    def test_zero_statistic(self):
        assert two_tailed_t_p(0.0, 4) == 1.0

    def test_sign_symmetric(self):
        assert two_tailed_t_p(2.5, 7) == two_tailed_t_p(-2.5, 7)

    def test_critical_value_df4(self):
        assert two_tailed_t_p(2.776, 4) == pytest.approx(0.05, abs=5e-4)

    def test_far_tail(self):
        assert two_tailed_t_p(22.36, 4) < 1e-3

    @pytest.mark.parametrize("df", [1, 2, 4, 10, 30])
    def test_agrees_with_integration_oracle(self, df):
        for t in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.776, 4.0, 6.5, 10.0]:
            assert two_tailed_t_p(t, df) == pytest.approx(
                oracle_two_tailed(t, df), abs=1e-4
            )

    def test_bad_df(self):
        with pytest.raises(ValidationError):
            two_tailed_t_p(1.0, 0)

    def test_non_finite_t(self):
        with pytest.raises(ValidationError):
            two_tailed_t_p(math.inf, 4)


class TestPmContinuous:
    def test_observed_at_mean(self):
        pred = ContinuousEnsemblePrediction(5.0, 1.0, 5)
        assert pm_continuous(pred, 5.0) == 1

    def test_far_observation_rejected(self):
        pred = ContinuousEnsemblePrediction(0.0, 1.0, 5)
        # t = 10 / (1/sqrt(5)) = 22.36, far beyond the df=4 critical value
        assert pm_continuous(pred, 10.0) == 0

    def test_flips_across_critical_value(self):
        pred = ContinuousEnsemblePrediction(0.0, math.sqrt(5.0), 5)  # t == observed
        assert pm_continuous(pred, T_CRIT_DF4 * 0.999, alpha=0.05) == 1
        assert pm_continuous(pred, T_CRIT_DF4 * 1.001, alpha=0.05) == 0

    def test_sign_symmetric(self):
        pred = ContinuousEnsemblePrediction(3.0, 0.8, 5)
        for delta in (0.1, 0.5, 1.0, 2.0):
            assert pm_continuous(pred, 3.0 + delta) == pm_continuous(pred, 3.0 - delta)

    def test_degenerate_std_exact_match(self):
        pred = ContinuousEnsemblePrediction(2.0, 0.0, 5)
        assert pm_continuous(pred, 2.0) == 1

    def test_degenerate_std_mismatch(self):
        pred = ContinuousEnsemblePrediction(2.0, 0.0, 5)
        assert pm_continuous(pred, 2.1) == 0

    def test_bad_alpha(self):
        pred = ContinuousEnsemblePrediction(0.0, 1.0, 5)
        with pytest.raises(ValidationError):
            pm_continuous(pred, 0.0, alpha=1.5)
