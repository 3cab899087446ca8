"""Best responses, equilibrium verification, bounds, and rule synthesis.

An agent reached by the chain weighs the stay-put payment ``f(i, i)``
against the continuation reward ``R_i`` earned on success.  The first-
order condition is

    ``R_i - f(i, i) = required_return(x_i)``        (interior optimum)

with the corner ``x_i = 0`` optimal whenever ``R_i <= f(i, i)``.  Since
``required_return`` is strictly increasing, a best response is the
inverse image of the net return, which is what
:func:`investment_for_return` computes by bracketing.

A rule *supports* a profile when every agent's investment is a best
response; :func:`verify_equilibrium` checks the condition for every
prefix agent plus representative tail agents (legitimate because both
the profile and the rule's columns are constant there, which is also
asserted by checking a second, deeper tail agent).

The self-financed variant caps each agent's investment by their own
stay-put payment (``x_i <= f(i, i) <= f(i, j)``): the money an agent can
sink must have been set aside for them no matter how the chain ends.
The corner ``x_i = f(i, i)`` with excess return is then also an optimum.

:func:`near_constant_feasibility` and :func:`synthesize_rule` implement
the support characterization for near-constant profiles
``(x0, c, c, ...)`` with per-agent floor ``gamma``: the profile is
supportable if and only if

    ``max(r(c) + gamma - 2, 0) <= r(x0) <= (1 - prize(c) - gamma) / (1 - p(c))``

where ``r`` is the required-return ratio.  The synthesizer builds the
two endpoint rules attaining the bounds and mixes them with the weight
that lands the initiator's net return exactly on ``r(x0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleError, TailShapeError, UnboundedRatioError
from .profiles import ConstantTailProfile
from .rates import SuccessRate
from .rules import (
    Mixture,
    RewardRule,
    continuation_reward,
    expected_payoff,
    fixed_fraction_floor,
    flat_continuation,
    next_step_bonus,
    next_step_bonus_zero_initiator,
)
from .solvers import bisect, expand_bracket

TOL_EQ = 1e-8
_ROOT_XTOL = 1e-12
_ZERO_INVESTMENT = 1e-12
_TAIL_EXTRA_AGENT = 5


class Mode(enum.Enum):
    UNCONSTRAINED = "unconstrained"
    SELF_FINANCED = "self_financed"


def investment_for_return(sr: SuccessRate, t: float) -> float:
    """The investment whose required return equals ``t`` (0 for ``t <= 0``).

    Bracket-doubles from ``[0, 1]`` and bisects to ``1e-12``; raises
    :class:`UnboundedRatioError` when ``t`` exceeds the ratio at the
    rate's domain cap.
    """
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"target return must be finite, got {t!r}")
    if t <= 0.0:
        return 0.0
    if t > sr.required_return(sr.domain_cap):
        raise UnboundedRatioError(
            f"no investment below {sr.domain_cap:g} attains return {t:g}"
        )

    def gap(x: float) -> float:
        return sr.required_return(x) - t

    lo, hi = expand_bracket(gap, 0.0, min(1.0, sr.domain_cap), limit=sr.domain_cap)
    return bisect(gap, lo, hi, xtol=_ROOT_XTOL)


def best_response(
    sr: SuccessRate,
    rule: RewardRule,
    x: ConstantTailProfile,
    i: int,
    *,
    budget: float | None = None,
) -> float:
    """Agent ``i``'s optimal investment against the others' profile.

    With ``budget`` set (self-financed play), the unconstrained response
    is clipped at the budget.
    """
    t = continuation_reward(sr, rule, x, i) - rule.value(i, i)
    r = investment_for_return(sr, t)
    if budget is not None:
        r = min(r, budget)
    return r


@dataclass(frozen=True)
class AgentCheck:
    agent: int
    investment: float
    net_return: float
    residual: float
    payoff: float
    corner: str = ""  # "", "zero", "budget"


@dataclass(frozen=True)
class EquilibriumReport:
    """Outcome of a support check: per-agent residuals and payoffs."""

    supported: bool
    mode: Mode
    tol: float
    checks: tuple[AgentCheck, ...]
    failures: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        return "Supported" if self.supported else "NotSupported"

    @property
    def checked_agents(self) -> int:
        return len(self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def residuals(self) -> tuple[tuple[int, float], ...]:
        return tuple((c.agent, c.residual) for c in self.checks)

    def payoffs(self) -> tuple[tuple[int, float], ...]:
        return tuple((c.agent, c.payoff) for c in self.checks)


def _column_floor_gap(rule: RewardRule, i: int) -> float:
    """min_j f(i, j) - f(i, i) over the structural column; negative means
    some continuation entry pays less than the stay-put payment."""
    col = rule.column(i)
    lowest = min(col.entries[1:]) if len(col.entries) > 1 else math.inf
    lowest = min(lowest, col.tail)
    if col.slope < 0.0:
        return -math.inf
    return lowest - col.entries[0]


def check_agent(
    sr: SuccessRate,
    rule: RewardRule,
    x: ConstantTailProfile,
    i: int,
    mode: Mode = Mode.UNCONSTRAINED,
    tol: float = TOL_EQ,
) -> AgentCheck:
    """Best-response residual of a single agent at the profile.

    Interior agents must satisfy the first-order condition; zero
    investments need a non-positive net return; in self-financed mode an
    investment at the budget ``f(i, i)`` may leave excess return.
    """
    xi = x.at(i)
    fii = rule.value(i, i)
    t = continuation_reward(sr, rule, x, i) - fii
    payoff = expected_payoff(sr, rule, x, i)
    if xi <= _ZERO_INVESTMENT:
        return AgentCheck(i, xi, t, max(t, 0.0), payoff, corner="zero")
    residual = abs(t - sr.required_return(xi))
    if (
        mode is Mode.SELF_FINANCED
        and residual > tol
        and abs(xi - fii) <= tol
        and t >= sr.required_return(xi) - tol
    ):
        return AgentCheck(i, xi, t, 0.0, payoff, corner="budget")
    return AgentCheck(i, xi, t, residual, payoff)


def verify_equilibrium(
    sr: SuccessRate,
    rule: RewardRule,
    x: ConstantTailProfile,
    mode: Mode = Mode.UNCONSTRAINED,
    tol: float = TOL_EQ,
) -> EquilibriumReport:
    """Does the rule support the profile?

    Checks every agent with an individual column or prefix investment,
    plus a representative tail agent and one further tail agent (the two
    must agree by stationarity; checking both asserts it).  In
    self-financed mode additionally enforces the budget ``x_i <= f(i,i)``
    and the structural condition ``f(i, i) <= f(i, j)``.
    """
    stationary = rule.stationary_from
    if stationary is None:
        raise TailShapeError(
            f"{rule.label}: columns never stabilize; no constant-tail "
            "profile can be verified against this rule"
        )
    first_tail = max(x.prefix_len, stationary)
    agents = list(range(first_tail)) + [first_tail, first_tail + _TAIL_EXTRA_AGENT]
    checks = []
    failures: list[str] = []
    for i in agents:
        chk = check_agent(sr, rule, x, i, mode, tol)
        checks.append(chk)
        if chk.residual > tol:
            failures.append(f"agent {i}: best-response residual {chk.residual:.3g}")
        if mode is Mode.SELF_FINANCED:
            over = x.at(i) - rule.value(i, i)
            if over > tol:
                failures.append(
                    f"agent {i}: investment exceeds stay-put budget by {over:.3g}"
                )
            gap = _column_floor_gap(rule, i)
            if gap < -tol:
                failures.append(
                    f"agent {i}: some continuation entry is below the "
                    f"stay-put payment (gap {gap:.3g})"
                )
    return EquilibriumReport(
        supported=not failures,
        mode=mode,
        tol=tol,
        checks=tuple(checks),
        failures=tuple(failures),
    )


@dataclass(frozen=True)
class BoundSchedule:
    """Per-agent caps on equilibrium investments for a capped rate.

    ``bound(i)`` solves ``required_return(B_i) = i + 1 + 1 / epsilon``:
    no equilibrium investment of agent ``i`` can exceed it, because the
    continuation reward is at most the value already created (``i + 1``)
    plus everything the future can add (below ``1 / epsilon``).  The
    bounds are finite but increase without limit in ``i``.
    """

    rate: SuccessRate
    epsilon: float

    def target(self, i: int) -> float:
        if i < 0:
            raise DomainError(f"agent index must be >= 0, got {i}")
        return i + 1.0 + 1.0 / self.epsilon

    def bound(self, i: int) -> float:
        return investment_for_return(self.rate, self.target(i))


def investment_bounds(sr: SuccessRate, epsilon: float | None = None) -> BoundSchedule:
    """Bound schedule for the rate; requires a positive cap parameter.

    ``epsilon`` defaults to the rate's own cap.  A cap of zero (the
    unscaled square-root family) leaves the bound undefined and is
    rejected.
    """
    eps = sr.epsilon if epsilon is None else float(epsilon)
    if not eps > 0.0:
        raise DomainError(
            "bounds need a positive cap parameter; this rate's success "
            "probability is not bounded away from 1"
        )
    return BoundSchedule(sr, eps)


@dataclass(frozen=True)
class DynamicsResult:
    """Outcome of truncated best-response sweeps."""

    profile: ConstantTailProfile
    converged: bool
    sweeps: int
    max_change: float
    residuals: tuple[tuple[int, float], ...]
    history: tuple[tuple[float, ...], ...]

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)


def best_response_dynamics(
    sr: SuccessRate,
    rule: RewardRule,
    horizon: int,
    init: ConstantTailProfile | None = None,
    *,
    sweeps: int = 200,
    damping: float = 1.0,
    tol: float = 1e-10,
) -> DynamicsResult:
    """Backward best-response sweeps over agents ``horizon-1 .. 0``.

    Agents at or beyond the horizon are frozen at the initial profile's
    values.  Backward order matters: continuation rewards depend only on
    successors, so one sweep already propagates the tail fixed point
    forward.  ``damping`` in ``(0, 1]`` blends old and new responses for
    rules whose responses interlock.  Non-convergence is reported, never
    raised; the residuals cover exactly the swept agents.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    if not 0.0 < damping <= 1.0:
        raise DomainError(f"damping must be in (0, 1], got {damping!r}")
    init = init if init is not None else ConstantTailProfile((), 0.0)
    values = [init.at(i) for i in range(horizon)]
    tail = init.tail
    history: list[tuple[float, ...]] = []
    converged = False
    sweeps_used = 0
    max_change = math.inf
    for sweep in range(1, sweeps + 1):
        sweeps_used = sweep
        max_change = 0.0
        for i in reversed(range(horizon)):
            current = ConstantTailProfile(tuple(values), tail)
            response = best_response(sr, rule, current, i)
            new = (1.0 - damping) * values[i] + damping * response
            max_change = max(max_change, abs(new - values[i]))
            values[i] = new
        history.append(tuple(values))
        if max_change <= tol:
            converged = True
            break
    final = ConstantTailProfile(tuple(values), tail)
    residuals = tuple(
        (i, check_agent(sr, rule, final, i).residual) for i in range(horizon)
    )
    return DynamicsResult(
        profile=final,
        converged=converged,
        sweeps=sweeps_used,
        max_change=max_change,
        residuals=residuals,
        history=tuple(history),
    )


@dataclass(frozen=True)
class ConstantSupport:
    """Support verdict for a constant profile, with witness or gap."""

    supported: bool
    investment: float
    gap: float  # prize(c) - p(c); positive means unsupportable
    witness: RewardRule | None

    @property
    def verdict(self) -> str:
        return "Supported" if self.supported else "NotSupported"


def constant_support_check(sr: SuccessRate, c: float, tol: float = 1e-9) -> ConstantSupport:
    """A constant profile is supportable iff ``p(c) >= prize(c)``.

    The witness sets the fraction to 1 and the floor to
    ``1 - prize(c)/p(c)``, which makes every agent's net return exactly
    the required one; at the boundary the witness degenerates to the
    equal split.
    """
    if c < 0.0:
        raise DomainError(f"investment must be >= 0, got {c!r}")
    prize = sr.incentive_prize(c)
    prob = sr.probability(c)
    gap = prize - prob
    if gap > tol:
        return ConstantSupport(False, c, gap, None)
    ratio = sr.required_return(c)  # prize / p, with the 0-at-0 convention
    witness = fixed_fraction_floor(1.0, max(0.0, 1.0 - ratio))
    return ConstantSupport(True, c, gap, witness)


@dataclass(frozen=True)
class NearConstantFeasibility:
    """Both support bounds for ``(x0, c, c, ...)`` with floor ``gamma``.

    ``lower`` is reported unclamped (it may be negative, in which case
    the binding lower bound is 0); ``ratio`` is the initiator's required
    return.  Feasible iff ``max(lower, 0) <= ratio <= upper``.
    """

    feasible: bool
    x0: float
    c: float
    gamma: float
    ratio: float
    lower: float
    upper: float

    @property
    def verdict(self) -> str:
        return "Feasible" if self.feasible else "Infeasible"


def near_constant_bounds(
    sr: SuccessRate, c: float, gamma: float = 0.0
) -> tuple[float, float]:
    """Unclamped lower and upper required-return bounds for the initiator."""
    if gamma < 0.0:
        raise DomainError(f"floor must be >= 0, got {gamma!r}")
    prize = sr.incentive_prize(c)
    prob = sr.probability(c)
    ratio = sr.required_return(c)
    lower = ratio + gamma - 2.0
    upper = (1.0 - prize - gamma) / (1.0 - prob)
    return lower, upper


def near_constant_feasibility(
    sr: SuccessRate,
    x0: float,
    c: float,
    gamma: float = 0.0,
    tol: float = 1e-9,
) -> NearConstantFeasibility:
    lower, upper = near_constant_bounds(sr, c, gamma)
    ratio = sr.required_return(x0)
    feasible = max(lower, 0.0) <= ratio + tol and ratio <= upper + tol
    return NearConstantFeasibility(feasible, x0, c, gamma, ratio, lower, upper)


def _initiator_return(sr: SuccessRate, rule: RewardRule, c: float) -> float:
    # net return the rule offers the initiator against a constant-c tail
    probe = ConstantTailProfile((), c)
    return continuation_reward(sr, rule, probe, 0) - rule.value(0, 0)


def synthesize_rule(
    sr: SuccessRate,
    x0: float,
    c: float,
    gamma: float = 0.0,
    tol: float = 1e-9,
) -> RewardRule:
    """A rule supporting ``(x0, c, c, ...)`` with floors ``f(i,i) >= gamma``.

    Builds the endpoint rules for the feasibility interval -- the pair
    depends on whether the tail's required return plus the floor stays
    below 1 -- and mixes them with the weight that places the initiator's
    net return exactly at ``required_return(x0)``.  Tail agents face the
    same net return under both endpoints, so any mixture keeps them at
    ``c``.  Raises :class:`InfeasibleError` outside the feasible band.
    """
    feas = near_constant_feasibility(sr, x0, c, gamma, tol)
    if not feas.feasible:
        raise InfeasibleError(
            f"(x0={x0:g}, c={c:g}, gamma={gamma:g}) is not supportable: "
            f"initiator return {feas.ratio:.6g} outside "
            f"[{max(feas.lower, 0.0):.6g}, {feas.upper:.6g}]"
        )
    tail_ratio = sr.required_return(c)
    if tail_ratio + gamma <= 1.0:
        high: RewardRule = fixed_fraction_floor(tail_ratio + gamma, gamma)
        low: RewardRule = flat_continuation(tail_ratio + gamma, gamma)
    else:
        beta = tail_ratio - feas.upper
        high = next_step_bonus(beta, gamma)
        low = next_step_bonus_zero_initiator(beta, gamma)
    v_high = _initiator_return(sr, high, c)
    v_low = _initiator_return(sr, low, c)
    target = feas.ratio
    if v_high - v_low <= 1e-15 or target >= v_high:
        return high
    weight = (target - v_low) / (v_high - v_low)
    weight = min(1.0, max(0.0, weight))
    if weight >= 1.0 - 1e-13:
        return high
    if weight <= 1e-13:
        return low
    return Mixture(weight, high, low)
