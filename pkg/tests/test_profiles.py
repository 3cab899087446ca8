"""Profile representation and the closed-form process functionals.

Brute-force partial sums (truncated at 200 terms) serve as the
independent oracle for the geometric closed forms throughout.
"""

import numpy as np
import pytest

from seqinvest import (
    ConstantTailProfile,
    DivergenceError,
    DomainError,
    constant_profile,
    custom_rate,
    expected_investment,
    expected_value,
    expected_welfare,
    flatten_tail,
    functionals,
    incentive_cost,
    near_constant_profile,
    reach_probability,
    scaled_sqrt_ratio,
)

TRUNC = 200


def brute_force(sr, x, term, n=TRUNC):
    """Direct partial sum of reach(j) * term(x_j); oracle for the closed forms."""
    total = 0.0
    reach = 1.0
    for j in range(n):
        total += reach * term(x.at(j))
        reach *= sr.probability(x.at(j))
    return total, reach


class TestRepresentation:
    def test_trailing_entries_absorbed(self):
        x = ConstantTailProfile((0.1, 0.2, 0.2), 0.2)
        assert x.prefix == (0.1,)
        assert x.tail == 0.2

    def test_all_equal_has_empty_prefix(self):
        assert ConstantTailProfile((0.3, 0.3), 0.3).prefix == ()

    def test_bad_entries_rejected(self):
        with pytest.raises(DomainError):
            ConstantTailProfile((-0.1,), 0.0)
        with pytest.raises(DomainError):
            ConstantTailProfile((), float("inf"))

    def test_indexing(self):
        x = ConstantTailProfile((0.5, 0.25), 0.1)
        assert [x.at(j) for j in range(4)] == [0.5, 0.25, 0.1, 0.1]
        with pytest.raises(DomainError):
            x.at(-1)


class TestReachProbability:
    def test_empty_product(self, sr):
        assert reach_probability(sr, constant_profile(0.7), 0) == 1.0

    def test_constant_quarter(self, sr):
        # p(0.25) = 1/3, two steps
        x = constant_profile(0.25)
        assert reach_probability(sr, x, 2) == pytest.approx(1.0 / 9.0, abs=1e-15)

    def test_equilibrium_prefix(self, sr, ex5_profile, oracle):
        assert reach_probability(sr, ex5_profile, 2) == pytest.approx(
            oracle.reach2_ex5, abs=1e-12
        )

    def test_beyond_prefix_uses_tail_powers(self, sr, ex5_profile):
        direct = 1.0
        for j in range(7):
            direct *= sr.probability(ex5_profile.at(j))
        assert reach_probability(sr, ex5_profile, 7) == pytest.approx(direct, rel=1e-14)


class TestExpectedValue:
    def test_zeros(self, sr):
        assert expected_value(sr, constant_profile(0.0)) == 1.0

    def test_constant_closed_form(self, sr, oracle):
        # V = 1 / (1 - p(c))
        assert expected_value(sr, constant_profile(0.2588)) == pytest.approx(
            oracle.value_const_2588, abs=1e-12
        )

    def test_equilibrium_profile(self, sr, ex5_profile, oracle):
        assert expected_value(sr, ex5_profile) == pytest.approx(
            oracle.ex5_value, abs=1e-12
        )

    def test_matches_truncated_sum(self, sr, ex5_profile):
        closed = expected_value(sr, ex5_profile)
        partial, reach = brute_force(sr, ex5_profile, lambda _: 1.0)
        bound = reach / (1.0 - sr.probability(ex5_profile.tail))
        assert abs(closed - partial) <= bound + 1e-15

    def test_divergent_tail_rejected(self):
        saturating = custom_rate("saturating", lambda x: min(x, 1.0), lambda x: 1.0)
        with pytest.raises(DivergenceError):
            expected_value(saturating, constant_profile(1.0))


class TestExpectedInvestment:
    def test_zeros(self, sr):
        assert expected_investment(sr, constant_profile(0.0)) == 0.0

    def test_constant_quarter(self, sr):
        # I = c / (1 - p(c)) = 0.25 / (2/3)
        assert expected_investment(sr, constant_profile(0.25)) == pytest.approx(
            0.375, abs=1e-15
        )

    def test_equilibrium_profile(self, sr, ex5_profile, oracle):
        assert expected_investment(sr, ex5_profile) == pytest.approx(
            oracle.ex5_invest, abs=1e-12
        )


class TestExpectedWelfare:
    def test_zeros(self, sr):
        assert expected_welfare(sr, constant_profile(0.0)) == 1.0

    def test_first_best_is_grid_max(self, sr, oracle):
        best = expected_welfare(sr, constant_profile(oracle.c_fb))
        assert best == pytest.approx(oracle.welfare_fb, abs=1e-12)
        for c in np.linspace(1e-4, 0.999, 400):
            assert expected_welfare(sr, constant_profile(c)) <= best + 1e-12

    def test_self_financed_optimum_value(self, sr, oracle):
        x = near_constant_profile(oracle.x0_s, oracle.c_s)
        assert expected_welfare(sr, x) == pytest.approx(oracle.welfare_s, abs=1e-12)

    def test_identity_exact(self, sr, ex5_profile):
        f = functionals(sr, ex5_profile)
        assert f.value - f.investment - f.welfare == 0.0


class TestIncentiveCost:
    def test_zeros(self, sr):
        assert incentive_cost(sr, constant_profile(0.0)) == 0.0

    def test_constant_closed_form(self, sr, oracle):
        # G = prize(c) / (1 - p(c))
        assert incentive_cost(sr, constant_profile(0.2588)) == pytest.approx(
            oracle.cost_const_2588, abs=1e-12
        )

    def test_equilibrium_profile(self, sr, ex5_profile, oracle):
        assert incentive_cost(sr, ex5_profile) == pytest.approx(
            oracle.ex5_cost, abs=1e-12
        )

    def test_flattening_is_cheaper(self, sr, ex5_profile, oracle):
        flat = flatten_tail(sr, ex5_profile, 1)
        assert incentive_cost(sr, flat) == pytest.approx(oracle.ex5_cost_flat, abs=1e-10)
        assert incentive_cost(sr, flat) <= incentive_cost(sr, ex5_profile) + 1e-9

    def test_matches_truncated_sum(self, sr, ex5_profile):
        closed = incentive_cost(sr, ex5_profile)
        partial, reach = brute_force(sr, ex5_profile, sr.incentive_prize)
        tail = ex5_profile.tail
        bound = reach * sr.incentive_prize(tail) / (1.0 - sr.probability(tail))
        assert abs(closed - partial) <= bound + 1e-15


class TestFlatten:
    def test_constant_profile_unchanged(self, sr):
        x = constant_profile(0.3)
        assert flatten_tail(sr, x, 0) == x

    def test_keeps_initiator(self, sr, ex5_profile, oracle):
        flat = flatten_tail(sr, ex5_profile, 1)
        assert flat.prefix == (oracle.ex5_x0,)
        assert flat.tail == pytest.approx(oracle.ex5_cbar, abs=1e-10)
        assert expected_value(sr, flat) == pytest.approx(
            expected_value(sr, ex5_profile), abs=1e-10
        )

    def test_full_flatten(self, sr, ex5_profile, oracle):
        flat = flatten_tail(sr, ex5_profile, 0)
        assert flat.prefix == ()
        assert flat.tail == pytest.approx(oracle.ex5_ctilde, abs=1e-10)

    def test_position_out_of_range(self, sr, ex5_profile):
        with pytest.raises(DomainError):
            flatten_tail(sr, ex5_profile, 3)

    def test_unreachable_position_flattens_to_zero(self, sr):
        x = ConstantTailProfile((0.5, 0.0, 0.3), 0.7)
        flat = flatten_tail(sr, x, 2)
        assert flat.tail == 0.0

    def test_investment_reduction_spot(self, sr, ex5_profile, oracle):
        flat = flatten_tail(sr, ex5_profile, 1)
        assert expected_investment(sr, flat) == pytest.approx(
            oracle.ex5_invest_flat, abs=1e-10
        )


class TestFlatteningProperties:
    """Random-profile checks that flattening never raises cost measures."""

    @pytest.mark.parametrize("rate_key", ["plain", "eps01", "eps05"])
    def test_never_increases_investment_or_cost(self, sr, rate_key):
        rate = {
            "plain": sr,
            "eps01": scaled_sqrt_ratio(0.1),
            "eps05": scaled_sqrt_ratio(0.5),
        }[rate_key]
        rng = np.random.default_rng(20240612)
        for _ in range(120):
            m = int(rng.integers(0, 7))
            prefix = tuple(rng.uniform(0.0, 2.0, size=m))
            x = ConstantTailProfile(prefix, float(rng.uniform(0.0, 2.0)))
            invest = expected_investment(rate, x)
            cost = incentive_cost(rate, x)
            for k in range(x.prefix_len + 1):
                flat = flatten_tail(rate, x, k)
                assert expected_investment(rate, flat) <= invest + 1e-9
                assert incentive_cost(rate, flat) <= cost + 1e-9
