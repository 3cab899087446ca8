"""Bracketing scalar solvers: bisection and golden-section search.

Every scalar solve in the library goes through these derivative-free
routines.  The functions being solved are monotone crossings or
single-peaked maxima, for which bracketing is robust even next to the
steep-at-zero boundary of the success rate.
"""

from __future__ import annotations

from typing import Callable

from .errors import BracketError

_INV_PHI = 0.6180339887498949  # (sqrt(5) - 1) / 2
_INV_PHI2 = 0.3819660112501051  # (3 - sqrt(5)) / 2


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    limit: float,
    grow: float = 2.0,
    max_steps: int = 200,
) -> tuple[float, float]:
    """Grow ``hi`` geometrically until ``f`` changes sign on ``[lo, hi]``.

    Raises :class:`BracketError` if no sign change is found before ``limit``.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo, lo
    steps = 0
    while flo * fhi > 0.0:
        if hi >= limit or steps >= max_steps:
            raise BracketError(
                f"no sign change on [{lo:g}, {hi:g}] up to limit {limit:g}"
            )
        hi = min(hi * grow, limit)
        fhi = f(hi)
        steps += 1
    return lo, hi


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of ``f`` on a sign-changing interval, to absolute ``xtol``."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"f({lo:g}) and f({hi:g}) have the same sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float = 1e-10,
) -> tuple[float, float, float]:
    """Maximizer of a single-peaked ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x), bracket_width)``; only valid when ``f`` rises then
    falls at most once on the interval.
    """
    a, b = lo, hi
    c = a + _INV_PHI2 * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = a + _INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x), b - a
