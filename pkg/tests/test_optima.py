"""The four optimum programs, their supporting rules, and region curves."""

import math

import numpy as np
import pytest

from seqinvest import (
    Mode,
    constant_profile,
    constant_support_check,
    expected_welfare,
    first_best_investment,
    initiator_optimal,
    investment_for_return,
    near_constant_bounds,
    near_constant_feasibility,
    near_constant_profile,
    region_curve_intersection,
    region_sweep,
    scaled_sqrt_ratio,
    self_financed_optimal,
    socially_optimal,
    verify_equilibrium,
    zero_initiator_improvement,
)


class TestFirstBest:
    def test_reference_value(self, sr, oracle):
        assert first_best_investment(sr) == pytest.approx(oracle.c_fb, abs=1e-10)

    def test_interior(self, sr):
        c = first_best_investment(sr)
        assert 0.0 < c < 1.0

    def test_prize_exceeds_probability_there(self, sr):
        c = first_best_investment(sr)
        assert sr.incentive_prize(c) > sr.probability(c)

    def test_welfare_grid_maximum(self, sr):
        c = first_best_investment(sr)
        best = expected_welfare(sr, constant_profile(c))
        for other in np.linspace(1e-4, 0.999, 500):
            assert expected_welfare(sr, constant_profile(other)) <= best + 1e-12

    def test_scaled_family(self, sr_scaled, oracle):
        assert first_best_investment(sr_scaled) == pytest.approx(
            oracle.c_fb_scaled, abs=1e-10
        )


class TestSociallyOptimal:
    def test_reference_value(self, sr, oracle):
        res = socially_optimal(sr)
        assert res.profile.prefix == ()
        assert res.profile.tail == pytest.approx(oracle.c_star, abs=1e-10)
        assert res.objective == pytest.approx(oracle.welfare_c_star, abs=1e-10)

    def test_below_first_best(self, sr):
        assert socially_optimal(sr).profile.tail < first_best_investment(sr)

    def test_supported_by_equal_split(self, sr):
        res = socially_optimal(sr)
        assert res.rule.label == "equal_split"
        assert res.report.supported
        assert res.max_residual <= 1e-9

    def test_perturbations_do_not_improve(self, sr, oracle):
        # supportable constants are exactly c <= c*; nearby feasible
        # points are all weakly worse
        res = socially_optimal(sr)
        for delta in np.linspace(-0.02, 0.0, 41):
            c = res.profile.tail + delta
            assert constant_support_check(sr, c).supported
            assert expected_welfare(sr, constant_profile(c)) <= res.objective + 1e-9


class TestInitiatorOptimal:
    def test_reference_values(self, sr, oracle):
        res = initiator_optimal(sr)
        assert res.profile.tail == pytest.approx(oracle.c_circ, abs=1e-10)
        assert res.profile.prefix[0] == pytest.approx(oracle.x0_circ, abs=1e-10)
        assert res.objective == pytest.approx(oracle.payoff0_circ, abs=1e-10)

    def test_tail_solves_reduced_cubic(self, sr):
        # for the reference family the stationarity condition reduces to
        # 8 s^3 + 12 s^2 + 4 s = 1 in s = sqrt(c); independent derivation
        s = math.sqrt(initiator_optimal(sr).profile.tail)
        assert 8 * s**3 + 12 * s**2 + 4 * s - 1 == pytest.approx(0.0, abs=1e-10)

    def test_initiator_invests_more_than_tail(self, sr):
        res = initiator_optimal(sr)
        assert res.profile.prefix[0] > res.profile.tail

    def test_initiator_below_first_best(self, sr):
        res = initiator_optimal(sr)
        assert res.profile.prefix[0] <= first_best_investment(sr) + 1e-12

    def test_supported_by_fixed_fraction(self, sr, oracle):
        res = initiator_optimal(sr)
        assert res.rule.label.startswith("fixed_fraction(alpha=")
        assert sr.required_return(res.profile.tail) == pytest.approx(
            oracle.alpha_circ, abs=1e-10
        )
        assert res.report.supported
        assert res.max_residual <= 1e-9

    def test_perturbations_do_not_improve(self, sr):
        # payoff rises in x0, so feasible perturbations cap x0 at the
        # upper support bound for the perturbed tail
        res = initiator_optimal(sr)
        c0 = res.profile.tail
        for dc in np.linspace(-0.005, 0.005, 41):
            c = c0 + dc
            _, upper = near_constant_bounds(sr, c, 0.0)
            x0 = investment_for_return(sr, upper)
            assert near_constant_feasibility(sr, x0, c, 0.0).feasible
            payoff = 1.0 + sr.incentive_prize(x0) - x0
            assert payoff <= res.objective + 1e-9


class TestSelfFinancedOptimal:
    def test_reference_values(self, sr, oracle):
        res = self_financed_optimal(sr)
        assert res.profile.tail == pytest.approx(oracle.c_s, abs=1e-9)
        assert res.profile.prefix[0] == pytest.approx(oracle.x0_s, abs=1e-9)
        assert res.objective == pytest.approx(oracle.welfare_s, abs=1e-10)

    def test_initiator_invests_more(self, sr):
        res = self_financed_optimal(sr)
        assert res.profile.prefix[0] > res.profile.tail

    def test_budget_shrinks_welfare(self, sr):
        assert self_financed_optimal(sr).objective <= socially_optimal(sr).objective

    def test_constraint_saturated(self, sr):
        res = self_financed_optimal(sr)
        residuals = dict(res.residuals)
        assert residuals["budget_constraint_active"] <= 1e-9
        assert residuals["reduced_objective_slope"] <= 1e-9

    def test_supported_in_sf_mode(self, sr, oracle):
        res = self_financed_optimal(sr)
        assert res.mode is Mode.SELF_FINANCED
        assert res.report.supported
        assert res.rule.label.startswith("fixed_fraction_floor(alpha=")
        assert sr.required_return(res.profile.tail) + res.profile.tail == pytest.approx(
            oracle.alpha_s, abs=1e-9
        )

    def test_perturbations_do_not_improve(self, sr):
        res = self_financed_optimal(sr)
        c0 = res.profile.tail
        for dc in np.linspace(-0.004, 0.004, 41):
            c = c0 + dc
            ratio = (1.0 - c - sr.incentive_prize(c)) / (1.0 - sr.probability(c))
            x0 = investment_for_return(sr, ratio)
            welfare = expected_welfare(sr, near_constant_profile(x0, c))
            assert welfare <= res.objective + 1e-9


class TestSinglePeaked:
    @pytest.mark.parametrize("shape", ["identity", "prize", "prize_plus_identity"])
    def test_rise_then_fall_once(self, sr, shape):
        h = {
            "identity": lambda c: c,
            "prize": sr.incentive_prize,
            "prize_plus_identity": lambda c: sr.incentive_prize(c) + c,
        }[shape]

        def q(c):
            return (1.0 - h(c)) / (1.0 - sr.probability(c))

        # sweep the domain where h stays below 1
        hi = 0.999
        while h(hi) >= 1.0:
            hi *= 0.9
        grid = np.linspace(1e-6, hi, 800)
        vals = [q(c) for c in grid]
        falls = 0
        rising = True
        for a, b in zip(vals, vals[1:]):
            if rising and b < a:
                rising = False
                falls += 1
            elif not rising:
                assert b <= a + 1e-12
        assert falls <= 1


class TestZeroInitiatorImprovement:
    def test_dominating_profile(self, sr):
        profile, rule, welfare = zero_initiator_improvement(sr)
        assert profile.prefix[0] > 0.0
        assert profile.tail == 0.0
        assert welfare > 1.0
        # stationarity: marginal success probability 1 at the optimum
        assert sr.marginal(profile.prefix[0]) == pytest.approx(1.0, rel=1e-9)
        assert verify_equilibrium(sr, rule, profile).supported


class TestRegion:
    def test_flattened_point_below_lower_curve(self, sr, oracle):
        rows = region_sweep(sr, [oracle.ex5_cbar], Mode.UNCONSTRAINED)
        row = rows[0]
        assert row.lower is not None and row.lower > oracle.ex5_x0

    def test_infeasible_tails_emit_empty(self, sr, oracle):
        rows = region_sweep(sr, [oracle.prize_one_level * 1.05], Mode.UNCONSTRAINED)
        assert rows[0].lower is None and rows[0].upper is None

    def test_curves_cross_at_reference_point(self, sr, oracle):
        c = region_curve_intersection(sr)
        assert c == pytest.approx(oracle.c_cross, abs=1e-9)
        # the crossing satisfies required_return = 3 - 2 p
        assert abs(sr.required_return(c) - (3.0 - 2.0 * sr.probability(c))) <= 1e-6

    def test_self_financed_inside_unconstrained(self, sr, oracle):
        grid = np.linspace(oracle.c_max_sf / 257, oracle.c_max_sf, 256, endpoint=False)
        free = region_sweep(sr, grid, Mode.UNCONSTRAINED)
        tight = region_sweep(sr, grid, Mode.SELF_FINANCED)
        for a, b in zip(free, tight):
            assert b.lower >= a.lower - 1e-12
            assert b.upper <= a.upper + 1e-12

    def test_self_financed_upper_hits_optimum(self, sr, oracle):
        rows = region_sweep(sr, [oracle.c_s], Mode.SELF_FINANCED)
        assert rows[0].upper == pytest.approx(oracle.x0_s, abs=1e-9)


class TestScaledRatePrograms:
    def test_all_four_solve_and_verify(self):
        rate = scaled_sqrt_ratio(0.5)
        c_fb = first_best_investment(rate)
        assert 0.0 < c_fb < 1.0
        for solve in (socially_optimal, initiator_optimal, self_financed_optimal):
            res = solve(rate)
            assert math.isfinite(res.objective)
            assert res.report.supported, solve.__name__
            assert res.max_residual <= 1e-8
