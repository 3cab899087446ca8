"""The four scalar optimum programs and the feasibility-region sweep.

All four optima reduce to one-dimensional solves over constant or
near-constant profiles, because flattening a profile's tail preserves
the expected value while lowering both the expected investment and the
incentive cost:

* *first best*: the constant investment maximizing welfare with no
  support constraint; the maximizer satisfies
  ``(1 - c) / (1 - p(c)) = required_return(c)``.  It is never
  supportable (the prize strictly exceeds the probability there).
* *socially optimal*: the welfare-maximizing supportable profile; the
  constant level where prize and probability meet, supported by the
  equal split.
* *initiator optimal*: the supportable profile maximizing the
  initiator's payoff; near-constant, with the tail maximizing
  ``(1 - prize(c)) / (1 - p(c))`` and the initiator saturating the upper
  support bound.  Supported by the fixed-fraction rule at the tail's
  required return.
* *self-financed optimal*: welfare maximization when investments are
  capped by the stay-put payments; near-constant with the constraint
  ``required_return(x0) = (1 - c - prize(c)) / (1 - p(c))`` active.
  Supported by a fixed-fraction-with-floor rule whose floor equals the
  tail investment.

Every solve uses bracketing only (bisection on a monotone crossing or a
sign-changing derivative inside a golden-section bracket); the searched
functions are single-peaked, which is established by the same curvature
argument for all of them (``(1 - h) / (1 - p)`` with ``h`` convex rises
then falls at most once).  The self-financed reduced objective has no
such guarantee, so its golden-section stage is seeded with a grid scan.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equilibrium import (
    EquilibriumReport,
    Mode,
    investment_for_return,
    near_constant_bounds,
    verify_equilibrium,
)
from .errors import BracketError, InfeasibleError
from .profiles import (
    ConstantTailProfile,
    constant_profile,
    expected_welfare,
    near_constant_profile,
)
from .rates import SuccessRate
from .rules import RewardRule, equal_split, fixed_fraction, fixed_fraction_floor
from .solvers import bisect, expand_bracket, golden_max

_GRID_POINTS = 256
_EDGE = 1e-12


@dataclass(frozen=True)
class OptimumResult:
    """A solved program: profile, supporting rule, and solve diagnostics."""

    name: str
    profile: ConstantTailProfile
    rule: RewardRule
    objective: float
    residuals: tuple[tuple[str, float], ...]
    bracket: tuple[float, float]
    report: EquilibriumReport
    mode: Mode = Mode.UNCONSTRAINED

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)


def _constant_welfare(sr: SuccessRate, c: float) -> float:
    return (1.0 - c) / (1.0 - sr.probability(c))


def first_best_investment(sr: SuccessRate) -> float:
    """Constant investment maximizing welfare, support ignored.

    Unique root of ``(1 - c) / (1 - p(c)) = required_return(c)`` in
    ``(0, 1)``; the difference starts positive (welfare 1, return 0) and
    ends negative at 1.
    """

    def gap(c: float) -> float:
        return _constant_welfare(sr, c) - sr.required_return(c)

    lo, hi = expand_bracket(gap, _EDGE, 1.0, limit=1.0)
    return bisect(gap, lo, hi)


def socially_optimal(sr: SuccessRate) -> OptimumResult:
    """Welfare-maximizing supportable profile: constant at prize = probability.

    Welfare over constants rises through the whole supportable band
    ``[0, c_star]`` (the first best lies beyond it), so the boundary
    point is the optimum, and the equal split supports it.
    """
    c_fb = first_best_investment(sr)

    def gap(c: float) -> float:
        return sr.incentive_prize(c) - sr.probability(c)

    if gap(_EDGE) >= 0.0:
        raise BracketError(
            "prize >= probability arbitrarily close to zero; the rate "
            "violates the steep-at-zero assumption"
        )
    c_star = bisect(gap, _EDGE, c_fb)
    profile = constant_profile(c_star)
    rule = equal_split()
    report = verify_equilibrium(sr, rule, profile)
    return OptimumResult(
        name="socially_optimal",
        profile=profile,
        rule=rule,
        objective=expected_welfare(sr, profile),
        residuals=(("prize_minus_probability", abs(gap(c_star))),),
        bracket=(_EDGE, c_fb),
        report=report,
    )


def _prize_level(sr: SuccessRate, level: float) -> float:
    """Investment where the incentive prize reaches ``level``."""

    def gap(c: float) -> float:
        return sr.incentive_prize(c) - level

    lo, hi = expand_bracket(gap, _EDGE, 1.0, limit=sr.domain_cap)
    return bisect(gap, lo, hi)


def initiator_optimal(sr: SuccessRate) -> OptimumResult:
    """Profile maximizing the initiator's payoff among supportable ones.

    The tail maximizes ``q(c) = (1 - prize(c)) / (1 - p(c))`` on
    ``[0, d]`` with ``prize(d) = 1`` (single-peaked there); the
    stationarity condition is

        ``p'(c) (1 - prize(c)) = prize'(c) (1 - p(c))``

    and the bisection on its sign refines the golden-section bracket.
    The initiator then saturates the upper support bound
    ``required_return(x0) = q(c)``, and the fixed-fraction rule at the
    tail's required return supports the profile.
    """
    d = _prize_level(sr, 1.0)

    def q(c: float) -> float:
        return (1.0 - sr.incentive_prize(c)) / (1.0 - sr.probability(c))

    def stationarity(c: float) -> float:
        return sr.marginal(c) * (1.0 - sr.incentive_prize(c)) - sr.incentive_prize_slope(
            c
        ) * (1.0 - sr.probability(c))

    c_seed, _, _ = golden_max(q, _EDGE, d, xtol=1e-6)
    lo, hi = c_seed, c_seed
    while stationarity(lo) <= 0.0 and lo > _EDGE:
        lo = max(_EDGE, lo / 2.0)
    while stationarity(hi) >= 0.0 and hi < d:
        hi = min(d, hi * 1.5)
    c_circ = bisect(stationarity, lo, hi, xtol=1e-14)
    x0_circ = investment_for_return(sr, q(c_circ))
    profile = near_constant_profile(x0_circ, c_circ)
    rule = fixed_fraction(sr.required_return(c_circ))
    report = verify_equilibrium(sr, rule, profile)
    objective = 1.0 + sr.incentive_prize(x0_circ) - x0_circ
    residuals = (
        ("tail_stationarity", abs(stationarity(c_circ))),
        ("initiator_bound_active", abs(sr.required_return(x0_circ) - q(c_circ))),
    )
    return OptimumResult(
        name="initiator_optimal",
        profile=profile,
        rule=rule,
        objective=objective,
        residuals=residuals,
        bracket=(lo, hi),
        report=report,
    )


def _self_financed_ratio(sr: SuccessRate, c: float) -> float:
    return (1.0 - c - sr.incentive_prize(c)) / (1.0 - sr.probability(c))


def _return_ratio_slope(sr: SuccessRate, x: float) -> float:
    # d/dx of required_return = (prize' p - prize p') / p^2
    p = sr.probability(x)
    return (
        sr.incentive_prize_slope(x) * p - sr.incentive_prize(x) * sr.marginal(x)
    ) / (p * p)


def _self_financed_ratio_slope(sr: SuccessRate, c: float) -> float:
    p = sr.probability(c)
    head = (-1.0 - sr.incentive_prize_slope(c)) * (1.0 - p)
    head += (1.0 - c - sr.incentive_prize(c)) * sr.marginal(c)
    return head / (1.0 - p) ** 2


def self_financed_optimal(sr: SuccessRate) -> OptimumResult:
    """Welfare-maximizing self-financed profile.

    For each tail ``c`` the binding constraint pins the initiator at
    ``required_return(x0) = (1 - c - prize(c)) / (1 - p(c))`` (welfare is
    non-decreasing in ``x0`` up to that point), leaving a reduced
    one-dimensional objective.  Nothing guarantees the reduced objective
    is unimodal, so a 256-point grid scan seeds the golden section, and a
    sign bisection on the chain-rule slope sharpens the argmax.  The
    supporting rule pays fraction ``required_return(c) + c`` with floor
    ``c``, verified in self-financed mode.
    """

    def prize_gap(c: float) -> float:
        return 1.0 - c - sr.incentive_prize(c)

    lo, hi = expand_bracket(prize_gap, _EDGE, 1.0, limit=sr.domain_cap)
    c_max = bisect(prize_gap, lo, hi)
    if c_max <= _EDGE:
        raise InfeasibleError("the self-financed feasible set is empty for this rate")

    def x0_of(c: float) -> float:
        return investment_for_return(sr, _self_financed_ratio(sr, c))

    def reduced_welfare(c: float) -> float:
        x0 = x0_of(c)
        return 1.0 - x0 + sr.probability(x0) * (1.0 - c) / (1.0 - sr.probability(c))

    def slope(c: float) -> float:
        # chain rule through the active constraint; exact up to the
        # bracketing tolerance of the inner inversion
        x0 = x0_of(c)
        dx0 = _self_financed_ratio_slope(sr, c) / _return_ratio_slope(sr, x0)
        pc = sr.probability(c)
        dwelfare_dc = (-(1.0 - pc) + (1.0 - c) * sr.marginal(c)) / (1.0 - pc) ** 2
        dwelfare_dx0 = -1.0 + sr.marginal(x0) * (1.0 - c) / (1.0 - pc)
        return dx0 * dwelfare_dx0 + sr.probability(x0) * dwelfare_dc

    step = c_max / (_GRID_POINTS + 1)
    grid = [step * (j + 1) for j in range(_GRID_POINTS)]
    values = [reduced_welfare(c) for c in grid]
    best = max(range(len(grid)), key=values.__getitem__)
    glo = grid[best - 1] if best > 0 else _EDGE
    ghi = grid[best + 1] if best + 1 < len(grid) else c_max - _EDGE
    c_seed, _, _ = golden_max(reduced_welfare, glo, ghi, xtol=1e-8)

    lo, hi = c_seed, c_seed
    while slope(lo) <= 0.0 and lo > glo:
        lo = max(glo, lo - 1e-5)
    while slope(hi) >= 0.0 and hi < ghi:
        hi = min(ghi, hi + 1e-5)
    c_s = bisect(slope, lo, hi, xtol=1e-13) if lo < hi else c_seed
    x0_s = x0_of(c_s)
    profile = near_constant_profile(x0_s, c_s)
    rule = fixed_fraction_floor(sr.required_return(c_s) + c_s, c_s)
    report = verify_equilibrium(sr, rule, profile, mode=Mode.SELF_FINANCED)
    residuals = (
        (
            "budget_constraint_active",
            abs(sr.required_return(x0_s) - _self_financed_ratio(sr, c_s)),
        ),
        ("reduced_objective_slope", abs(slope(c_s))),
    )
    return OptimumResult(
        name="self_financed_optimal",
        profile=profile,
        rule=rule,
        objective=expected_welfare(sr, profile),
        residuals=residuals,
        bracket=(glo, ghi),
        report=report,
        mode=Mode.SELF_FINANCED,
    )


@dataclass(frozen=True)
class RegionRow:
    """One grid point of the near-constant support region boundary.

    ``lower``/``upper`` are the initiator investments attaining the two
    support bounds, ``None`` when the tail is altogether infeasible
    (upper bound negative).  The curves are emitted even where they
    cross, matching how the region boundary is usually plotted.
    """

    c: float
    diagonal: float
    lower: float | None
    upper: float | None


def region_sweep(
    sr: SuccessRate, c_values, mode: Mode = Mode.UNCONSTRAINED
) -> list[RegionRow]:
    """Support-region boundary over a tail grid.

    Floor 0 in unconstrained mode and floor ``c`` in self-financed mode;
    the self-financed curves always sit weakly inside the unconstrained
    ones because the floor tightens both bounds.
    """
    rows: list[RegionRow] = []
    for c in c_values:
        gamma = c if mode is Mode.SELF_FINANCED else 0.0
        lower, upper = near_constant_bounds(sr, c, gamma)
        if upper < 0.0:
            rows.append(RegionRow(c, c, None, None))
            continue
        x_lower = investment_for_return(sr, max(lower, 0.0))
        x_upper = investment_for_return(sr, upper)
        rows.append(RegionRow(c, c, x_lower, x_upper))
    return rows


def region_curve_intersection(sr: SuccessRate) -> float:
    """Tail level where the unconstrained support band closes.

    Solves ``lower(c) = upper(c)``, equivalently
    ``required_return(c) = 3 - 2 p(c)``; beyond it no near-constant
    profile with that tail is supportable.
    """

    def gap(c: float) -> float:
        lower, upper = near_constant_bounds(sr, c, 0.0)
        return lower - upper

    d = _prize_level(sr, 1.0)
    hi = d * (1.0 - 1e-9)
    if gap(hi) <= 0.0:
        raise BracketError("support band does not close below the prize-1 level")
    lo, hi = expand_bracket(gap, _EDGE, d / 4.0, limit=hi)
    return bisect(gap, lo, hi)


def zero_initiator_improvement(sr: SuccessRate) -> tuple[ConstantTailProfile, RewardRule, float]:
    """A supportable profile strictly improving on any zero-initiator one.

    Awarding the whole row to the initiator (fraction 0) makes everyone
    else stay out while the initiator invests to ``marginal(x) = 1``;
    welfare then exceeds 1, the welfare of every zero-initiator profile.
    """
    rule = fixed_fraction(0.0)
    x0 = investment_for_return(sr, 1.0)
    profile = ConstantTailProfile((x0,), 0.0)
    return profile, rule, expected_welfare(sr, profile)
