"""Success-rate evaluators, derived quantities, and grid validation."""

import math

import numpy as np
import pytest

from seqinvest import (
    DomainError,
    custom_rate,
    rate_from_config,
    register_rate,
    scaled_sqrt_ratio,
    validate,
)

GRID = np.geomspace(1e-6, 1e3, 160)


class TestClosedForms:
    def test_probability_at_zero(self, sr):
        assert sr.probability(0.0) == 0.0

    def test_probability_quarter(self, sr):
        # sqrt(0.25) / (1 + sqrt(0.25)) = 0.5 / 1.5
        assert sr.probability(0.25) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_probability_combination_point(self, sr, oracle):
        assert sr.probability(0.1777) == pytest.approx(oracle.p_01777, abs=1e-12)

    def test_prize_at_zero_is_limit(self, sr):
        assert sr.incentive_prize(0.0) == 0.0

    def test_prize_quarter(self, sr):
        # 2 * 0.25 * 1.5
        assert sr.incentive_prize(0.25) == pytest.approx(0.75, abs=1e-15)

    def test_prize_slope_values(self, sr):
        assert sr.incentive_prize_slope(1.0) == pytest.approx(5.0, abs=1e-15)
        assert sr.incentive_prize_slope(0.25) == pytest.approx(3.5, abs=1e-15)
        assert sr.incentive_prize_slope(0.0264) == pytest.approx(
            2.0 + 3.0 * math.sqrt(0.0264), abs=1e-15
        )

    def test_required_return_spot(self, sr, oracle):
        assert sr.required_return(0.0131) == pytest.approx(
            oracle.ratio_00131, abs=1e-12
        )

    def test_required_return_zero_limit(self, sr):
        assert sr.required_return(0.0) == 0.0


class TestDomain:
    def test_negative_rejected(self, sr):
        with pytest.raises(DomainError):
            sr.probability(-1e-9)

    def test_non_finite_rejected(self, sr):
        for bad in (math.nan, math.inf):
            with pytest.raises(DomainError):
                sr.probability(bad)

    def test_beyond_cap_rejected(self, sr):
        with pytest.raises(DomainError):
            sr.probability(2e6)

    def test_prize_slope_needs_positive(self, sr):
        with pytest.raises(DomainError):
            sr.incentive_prize_slope(0.0)

    def test_scaled_epsilon_range(self):
        with pytest.raises(DomainError):
            scaled_sqrt_ratio(0.0)
        with pytest.raises(DomainError):
            scaled_sqrt_ratio(1.0)


class TestScaledFamily:
    def test_probability_scaled(self, sr, sr_scaled, oracle):
        for x in (0.01, 0.3, 2.0):
            assert sr_scaled.probability(x) == pytest.approx(
                (1.0 - oracle.eps_half_sqrt2) * sr.probability(x), abs=1e-15
            )

    def test_prize_unchanged_by_scaling(self, sr, sr_scaled):
        # the scale cancels in p / p'
        for x in (0.01, 0.3, 2.0):
            assert sr_scaled.incentive_prize(x) == pytest.approx(
                sr.incentive_prize(x), abs=1e-15
            )

    def test_cap_honoured(self, sr_scaled, oracle):
        # p stays below 1 - eps even for enormous investments
        assert sr_scaled.probability(1e6) < 1.0 - oracle.eps_half_sqrt2

    def test_validation_passes(self, sr_scaled):
        assert validate(sr_scaled).passed


class TestDerivedIdentities:
    def test_prize_times_marginal_equals_probability(self, sr):
        for x in GRID:
            p = sr.probability(x)
            err = abs(sr.incentive_prize(x) * sr.marginal(x) - p)
            assert err <= 1e-10 * max(1.0, p)

    def test_marginal_matches_finite_difference(self, sr):
        # away from zero, where the quotient is numerically meaningful
        for x in np.geomspace(1e-2, 1e3, 120):
            h = 1e-6 * max(1.0, x)
            fd = (sr.probability(x + h) - sr.probability(x - h)) / (2.0 * h)
            assert abs(sr.marginal(x) - fd) <= 1e-5

    def test_required_return_strictly_increasing(self, sr):
        vals = [sr.required_return(x) for x in GRID]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestValidation:
    def test_reference_family_passes(self, sr):
        report = validate(sr)
        assert report.passed, report.lines()

    def test_kinked_rate_flagged(self):
        rate = custom_rate(
            "kinked",
            lambda x: min(x, 0.9),
            lambda x: 1.0 if x < 0.9 else 0.0,
            epsilon=0.1,
        )
        report = validate(rate)
        names = {c.name for c in report.failures()}
        assert "concave" in names  # flat slopes are not strictly decreasing
        assert not report.passed

    def test_custom_wrapper_matches_builtin(self, sr):
        mirror = custom_rate("mirror", sr.probability, sr.marginal)
        for x in (0.02, 0.3, 4.0):
            assert mirror.incentive_prize(x) == pytest.approx(
                sr.incentive_prize(x), rel=1e-12
            )
            # derived slope is a finite difference, so looser tolerance
            assert mirror.incentive_prize_slope(x) == pytest.approx(
                sr.incentive_prize_slope(x), rel=1e-6
            )
        assert validate(mirror).passed

    def test_report_lines_render(self, sr):
        lines = validate(sr, points=64).lines()
        assert lines and all(line.startswith("pass") for line in lines)

    def test_never_raises_even_when_unevaluable(self):
        def explode(_):
            raise RuntimeError("boom")

        report = validate(custom_rate("broken", explode, explode), points=32)
        assert not report.passed
        assert {c.name for c in report.failures()} >= {"evaluable", "increasing"}


class TestRegistry:
    def test_config_round_trip(self):
        assert rate_from_config("sqrt_ratio").name == "sqrt_ratio"
        assert rate_from_config("scaled_sqrt_ratio", 0.5).epsilon == 0.5

    def test_custom_lookup(self, sr):
        register_rate("mirror_rate", custom_rate("mirror_rate", sr.probability, sr.marginal))
        assert rate_from_config("custom", name="mirror_rate").name == "mirror_rate"

    def test_unknown_rejected(self):
        with pytest.raises(DomainError):
            rate_from_config("cubic")
        with pytest.raises(DomainError):
            rate_from_config("custom", name="never_registered")
