"""Success-rate primitives for sequential investment processes.

A success rate maps an agent's investment ``x >= 0`` to the probability
``p(x)`` that the agent extends the process by one step.  The library
assumes throughout that ``p`` is increasing, differentiable, concave,
steep at zero (``p'(x) -> inf`` as ``x -> 0+``), and capped strictly
below 1.  Two derived quantities drive every first-order condition:

* ``incentive_prize(x) = p(x) / p'(x)`` -- the gross prize at which a
  risk-neutral agent finds investing exactly ``x`` optimal; assumed
  convex, with the limit convention that it vanishes at zero.
* ``required_return(x) = incentive_prize(x) / p(x) = 1 / p'(x)`` -- the
  net expected continuation return that makes ``x`` a best response;
  strictly increasing because ``p`` is concave.

Built-in families:

* ``sqrt_ratio``: ``p(x) = sqrt(x) / (1 + sqrt(x))``, with closed forms
  ``incentive_prize(x) = 2 x (1 + sqrt(x))`` and slope ``2 + 3 sqrt(x)``.
  Its supremum is 1, so the cap parameter is 0 and any bound that needs
  ``1 / cap`` is unavailable for this family.
* ``scaled_sqrt_ratio``: ``p(x) = (1 - eps) sqrt(x) / (1 + sqrt(x))``
  with cap ``eps in (0, 1)``.  The prize and its slope coincide with
  ``sqrt_ratio`` (the scale cancels in ``p / p'``).
* custom rates: user-supplied ``p`` and ``p'``; the prize is derived and
  its slope falls back to a central finite difference.

Rates are immutable after construction and safe to share across workers.
Validation (:func:`validate`) is advisory: solvers accept unvalidated
rates, and a rate that violates the assumptions is reported, not
rejected, so pathological rates can still be diagnosed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

DEFAULT_DOMAIN_CAP = 1e6


def _sqrt_p(x: float) -> float:
    s = math.sqrt(x)
    return s / (1.0 + s)


def _sqrt_p_prime(x: float) -> float:
    if x == 0.0:
        return math.inf
    s = math.sqrt(x)
    return 1.0 / (2.0 * s * (1.0 + s) ** 2)


def _sqrt_prize(x: float) -> float:
    return 2.0 * x * (1.0 + math.sqrt(x))


def _sqrt_prize_slope(x: float) -> float:
    return 2.0 + 3.0 * math.sqrt(x)


@dataclass(frozen=True)
class SuccessRate:
    """An investment-to-success-probability map with its derived quantities.

    ``epsilon`` is the cap parameter: ``p(x) <= 1 - epsilon`` everywhere.
    ``domain_cap`` is the largest investment the numeric evaluators are
    validated on; evaluations beyond it raise :class:`DomainError`, since
    no quantity the solvers produce requires larger arguments.
    """

    name: str
    epsilon: float
    domain_cap: float
    _p: Callable[[float], float] = field(repr=False)
    _p_prime: Callable[[float], float] = field(repr=False)
    _prize: Callable[[float], float] | None = field(default=None, repr=False)
    _prize_slope: Callable[[float], float] | None = field(default=None, repr=False)

    def _check(self, x: float, *, positive: bool = False) -> float:
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"{self.name}: investment must be finite, got {x!r}")
        if x < 0.0:
            raise DomainError(f"{self.name}: investment must be >= 0, got {x!r}")
        if positive and x == 0.0:
            raise DomainError(f"{self.name}: investment must be > 0 here")
        if x > self.domain_cap:
            raise DomainError(
                f"{self.name}: investment {x:g} exceeds domain cap {self.domain_cap:g}"
            )
        return x

    def probability(self, x: float) -> float:
        """Success probability ``p(x)``."""
        return self._p(self._check(x))

    def marginal(self, x: float) -> float:
        """Marginal success probability ``p'(x)``; may be ``inf`` at zero."""
        return self._p_prime(self._check(x))

    def incentive_prize(self, x: float) -> float:
        """Gross prize ``p(x) / p'(x)`` making ``x`` an optimal investment."""
        x = self._check(x)
        if self._prize is not None:
            return self._prize(x)
        if x == 0.0:
            return 0.0
        return self._p(x) / self._p_prime(x)

    def incentive_prize_slope(self, x: float) -> float:
        """Derivative of :meth:`incentive_prize`.

        Closed form for the built-in families; central finite difference
        with step ``max(1e-6, 1e-6 * x)`` (clamped into the domain) for
        custom rates.  Requires ``x > 0``.
        """
        x = self._check(x, positive=True)
        if self._prize_slope is not None:
            return self._prize_slope(x)
        h = max(1e-6, 1e-6 * x)
        h = min(h, 0.5 * x)
        return (self.incentive_prize(x + h) - self.incentive_prize(x - h)) / (2.0 * h)

    def required_return(self, x: float) -> float:
        """Return ratio ``incentive_prize(x) / p(x) = 1 / p'(x)``.

        The limit convention at zero gives 0 (the rate is steep at zero).
        Strictly increasing, which makes it invertible; see
        :func:`seqinvest.equilibrium.investment_for_return`.
        """
        x = self._check(x)
        if x == 0.0:
            return 0.0
        d = self._p_prime(x)
        if d <= 0.0:
            return math.inf
        return 1.0 / d


def sqrt_ratio(domain_cap: float = DEFAULT_DOMAIN_CAP) -> SuccessRate:
    """The reference family ``p(x) = sqrt(x) / (1 + sqrt(x))`` (cap 0)."""
    return SuccessRate(
        "sqrt_ratio", 0.0, domain_cap,
        _sqrt_p, _sqrt_p_prime, _sqrt_prize, _sqrt_prize_slope,
    )


def scaled_sqrt_ratio(
    epsilon: float, domain_cap: float = DEFAULT_DOMAIN_CAP
) -> SuccessRate:
    """``p(x) = (1 - epsilon) sqrt(x) / (1 + sqrt(x))`` with cap ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon!r}")
    scale = 1.0 - epsilon

    def p(x: float) -> float:
        return scale * _sqrt_p(x)

    def p_prime(x: float) -> float:
        return scale * _sqrt_p_prime(x)

    return SuccessRate(
        f"scaled_sqrt_ratio(eps={epsilon:g})", epsilon, domain_cap,
        p, p_prime, _sqrt_prize, _sqrt_prize_slope,
    )


def custom_rate(
    name: str,
    p: Callable[[float], float],
    p_prime: Callable[[float], float],
    *,
    epsilon: float = 0.0,
    domain_cap: float = DEFAULT_DOMAIN_CAP,
) -> SuccessRate:
    """Wrap user-supplied ``p`` and ``p'`` evaluators.

    The prize and its slope are derived, so the caller's contract stays
    minimal; run :func:`validate` to diagnose assumption violations.
    """
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"epsilon must be in [0, 1), got {epsilon!r}")
    return SuccessRate(name, epsilon, domain_cap, p, p_prime)


_REGISTRY: dict[str, SuccessRate] = {}


def register_rate(name: str, rate: SuccessRate) -> None:
    """Register a custom rate for lookup by name (library API only)."""
    _REGISTRY[name] = rate


def rate_from_config(
    family: str,
    epsilon: float = 0.0,
    *,
    name: str | None = None,
    domain_cap: float = DEFAULT_DOMAIN_CAP,
) -> SuccessRate:
    """Build a rate from its configuration fields.

    ``family`` is one of ``sqrt_ratio``, ``scaled_sqrt_ratio`` or
    ``custom``; custom rates must have been registered beforehand via
    :func:`register_rate` and are resolved through ``name``.
    """
    if family == "sqrt_ratio":
        return sqrt_ratio(domain_cap)
    if family == "scaled_sqrt_ratio":
        return scaled_sqrt_ratio(epsilon, domain_cap)
    if family == "custom":
        if name is None or name not in _REGISTRY:
            raise DomainError(f"unknown custom rate {name!r}; register it first")
        return _REGISTRY[name]
    raise DomainError(f"unknown rate family {family!r}")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_x: float | None = None
    worst_value: float | None = None
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Per-assumption grid checks for a rate; failures are data, not errors."""

    rate: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            extra = ""
            if not c.passed and c.worst_x is not None:
                extra = f"  worst at x={c.worst_x:.6g} ({c.worst_value:.6g})"
            out.append(f"{status}  {c.name}{extra}")
        return out


def _safe_eval(fn: Callable[[float], float], xs: np.ndarray) -> np.ndarray:
    out = np.empty(xs.shape)
    for i, x in enumerate(xs):
        try:
            out[i] = fn(float(x))
        except Exception:
            out[i] = np.nan
    return out


def validate(
    sr: SuccessRate,
    points: int = 512,
    *,
    tol_convex: float = 1e-8,
    tol_limit: float = 1e-6,
) -> ValidationReport:
    """Check the modelling assumptions on a logarithmic grid.

    The grid spans ``(1e-9, domain_cap]``.  Checks: ``p(0) = 0``; ``p``
    strictly increasing; ``p`` concave (divided differences strictly
    decreasing); prize above investment (``p/p' > x`` for ``x > 0``);
    prize convex (second divided differences above ``-tol_convex``); and
    prize vanishing at zero (value at the smallest grid point below
    ``tol_limit``).  Never raises -- pathological rates are reported so
    they can be diagnosed.
    """
    grid = np.geomspace(1e-9, sr.domain_cap, points)
    pv = _safe_eval(sr.probability, grid)
    gv = _safe_eval(sr.incentive_prize, grid)
    checks: list[CheckResult] = []

    try:
        p0 = sr.probability(0.0)
        checks.append(
            CheckResult("starts_at_zero", abs(p0) <= 1e-12, 0.0, p0)
        )
    except Exception as exc:  # pragma: no cover - defensive
        checks.append(CheckResult("starts_at_zero", False, 0.0, None, str(exc)))

    if np.isnan(pv).any():
        bad = float(grid[int(np.isnan(pv).argmax())])
        checks.append(CheckResult("evaluable", False, bad, None, "p not evaluable"))
    else:
        checks.append(CheckResult("evaluable", True))

    def worst_index(arr: np.ndarray, highest: bool) -> int:
        if arr.size == 0 or np.isnan(arr).all():
            return 0
        return int(np.nanargmax(arr) if highest else np.nanargmin(arr))

    diffs = np.diff(pv)
    ok = bool(np.all(diffs > 0.0)) and not np.isnan(diffs).any()
    worst = worst_index(diffs, highest=False)
    checks.append(
        CheckResult("increasing", ok, float(grid[worst]), float(diffs[worst]))
    )

    slopes = diffs / np.diff(grid)
    dslopes = np.diff(slopes)
    ok = bool(np.all(dslopes < 0.0)) and not np.isnan(dslopes).any()
    worst = worst_index(dslopes, highest=True)
    checks.append(
        CheckResult("concave", ok, float(grid[worst + 1]), float(dslopes[worst]))
    )

    margin = gv - grid
    ok = bool(np.all(margin > 0.0)) and not np.isnan(margin).any()
    worst = worst_index(margin, highest=False)
    checks.append(
        CheckResult(
            "prize_exceeds_investment", ok, float(grid[worst]), float(margin[worst])
        )
    )

    gslopes = np.diff(gv) / np.diff(grid)
    curv = np.diff(gslopes)
    ok = bool(np.all(curv >= -tol_convex)) and not np.isnan(curv).any()
    worst = worst_index(curv, highest=False)
    checks.append(
        CheckResult("prize_convex", ok, float(grid[worst + 1]), float(curv[worst]))
    )

    g_small = gv[0]
    ok = bool(np.isfinite(g_small)) and abs(g_small) <= tol_limit
    checks.append(
        CheckResult("prize_vanishes_at_zero", ok, float(grid[0]), float(g_small))
    )

    return ValidationReport(sr.name, tuple(checks))
