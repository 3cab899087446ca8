"""Monte Carlo simulation of the investment chain.

Each episode walks the chain: agent ``j`` succeeds with probability
``p(x_j)``, the first failure at ``k`` ends the episode, total value
``k + 1`` is split by the rule's row ``k``, and every reached agent has
sunk their investment.  Because the profile and rule are deterministic,
every per-episode statistic is a function of the terminal index alone,
so the engine simulates in vectorized "waves" (one uniform draw per
still-active episode per step) and aggregates exactly from the
terminal-index histogram.

Randomness comes from counter-based Philox streams.  Shards draw from
generators spawned off one seed sequence (``SeedSequence(seed).spawn``),
so they are independent by construction without communication, and the
merge -- summing histograms -- is associative and deterministic given
the shard plan.  Identical seed and configuration reproduce summaries
bit for bit.

Episodes that outlive the safety cap are discarded (with the count
reported), never truncated, since truncation would bias the means; under
a capped rate the discard probability is at most ``(1 - eps)**cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChainCapError, DomainError
from .profiles import ConstantTailProfile
from .rates import SuccessRate
from .rules import RewardRule


@dataclass(frozen=True)
class SimulationConfig:
    """Engine parameters; the profile and rule are passed alongside."""

    episodes: int = 1_000_000
    seed: int = 0
    max_chain_length: int = 10_000
    shards: int = 1
    payoff_horizon: int = 8

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise DomainError(f"episodes must be >= 1, got {self.episodes}")
        if self.max_chain_length < 1:
            raise DomainError(
                f"max_chain_length must be >= 1, got {self.max_chain_length}"
            )
        if self.shards < 1:
            raise DomainError(f"shards must be >= 1, got {self.shards}")
        if self.payoff_horizon < 0:
            raise DomainError(
                f"payoff_horizon must be >= 0, got {self.payoff_horizon}"
            )


@dataclass(frozen=True)
class Stat:
    mean: float
    se: float


@dataclass(frozen=True)
class PayoffStat:
    agent: int
    reached: int
    mean: float
    se: float


@dataclass(frozen=True)
class SimulationSummary:
    """Means and standard errors of the per-episode statistics.

    Per-agent payoffs are conditional on the agent being reached, which
    is the interim expectation the payoff functional describes.  The
    histogram counts episodes by terminal index.
    """

    episodes: int
    discarded: int
    terminal_index: Stat
    total_value: Stat
    total_investment: Stat
    welfare: Stat
    payoffs: tuple[PayoffStat, ...]
    histogram: tuple[int, ...]


def run_episode(
    sr: SuccessRate,
    profile: ConstantTailProfile,
    rule: RewardRule,
    rng: np.random.Generator,
    max_chain_length: int = 10_000,
) -> tuple[int, tuple[float, ...]]:
    """One chain realization: terminal index and payoffs of agents ``<= k``.

    Agent ``j`` succeeds iff the next uniform draw is below ``p(x_j)``.
    Raises :class:`ChainCapError` past the safety cap so callers can
    discard (the engine reports the discard count instead of truncating).
    """
    j = 0
    while True:
        if j >= max_chain_length:
            raise ChainCapError(f"chain exceeded {max_chain_length} agents")
        if rng.random() >= sr.probability(profile.at(j)):
            break
        j += 1
    payoffs = tuple(rule.value(i, j) - profile.at(i) for i in range(j + 1))
    return j, payoffs


def _shard_histogram(
    sr: SuccessRate,
    profile: ConstantTailProfile,
    episodes: int,
    rng: np.random.Generator,
    max_chain_length: int,
) -> tuple[np.ndarray, int]:
    """Counts of episodes by terminal index, plus the discard count."""
    counts: list[int] = []
    remaining = episodes
    step = 0
    while remaining > 0 and step < max_chain_length:
        u = rng.random(remaining)
        successes = int(np.count_nonzero(u < sr.probability(profile.at(step))))
        counts.append(remaining - successes)
        remaining = successes
        step += 1
    return np.asarray(counts, dtype=np.int64), remaining


def _rngs(config: SimulationConfig) -> list[np.random.Generator]:
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.shards) if config.shards > 1 else [root]
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _shard_sizes(episodes: int, shards: int) -> list[int]:
    base, extra = divmod(episodes, shards)
    return [base + (1 if s < extra else 0) for s in range(shards)]


def terminal_histogram(
    sr: SuccessRate, profile: ConstantTailProfile, config: SimulationConfig
) -> tuple[np.ndarray, int]:
    """Merged terminal-index histogram over all shards, plus discards."""
    sizes = _shard_sizes(config.episodes, config.shards)
    merged = np.zeros(0, dtype=np.int64)
    discarded = 0
    for rng, size in zip(_rngs(config), sizes):
        if size == 0:
            continue
        counts, dropped = _shard_histogram(
            sr, profile, size, rng, config.max_chain_length
        )
        if counts.size > merged.size:
            counts[: merged.size] += merged
            merged = counts
        else:
            merged[: counts.size] += counts
        discarded += dropped
    return merged, discarded


def terminal_samples(
    sr: SuccessRate, profile: ConstantTailProfile, config: SimulationConfig
) -> np.ndarray:
    """Terminal indices of the kept episodes, expanded from the histogram."""
    hist, _ = terminal_histogram(sr, profile, config)
    return np.repeat(np.arange(hist.size), hist)


def _stat(hist: np.ndarray, values: np.ndarray) -> Stat:
    n = int(hist.sum())
    if n == 0:
        return Stat(math.nan, math.nan)
    mean = float(hist @ values) / n
    if n == 1:
        return Stat(mean, math.nan)
    var = float(hist @ (values - mean) ** 2) / (n - 1)
    return Stat(mean, math.sqrt(var / n))


def summarize(
    sr: SuccessRate,
    profile: ConstantTailProfile,
    rule: RewardRule,
    config: SimulationConfig,
) -> SimulationSummary:
    """Simulate and aggregate; deterministic given the configuration."""
    hist, discarded = terminal_histogram(sr, profile, config)
    kept = int(hist.sum())
    kmax = hist.size - 1
    ks = np.arange(hist.size, dtype=np.float64)
    investments = np.cumsum([profile.at(j) for j in range(hist.size)])

    terminal = _stat(hist, ks)
    value = Stat(terminal.mean + 1.0, terminal.se)
    investment = _stat(hist, investments)
    welfare = _stat(hist, ks + 1.0 - investments)

    payoffs = []
    for i in range(min(config.payoff_horizon, kmax) + 1):
        sub = hist[i:]
        rewards = np.array(
            [rule.value(i, k) for k in range(i, hist.size)], dtype=np.float64
        )
        stat = _stat(sub, rewards - profile.at(i))
        payoffs.append(PayoffStat(i, int(sub.sum()), stat.mean, stat.se))

    return SimulationSummary(
        episodes=kept,
        discarded=discarded,
        terminal_index=terminal,
        total_value=value,
        total_investment=investment,
        welfare=welfare,
        payoffs=tuple(payoffs),
        histogram=tuple(int(n) for n in hist),
    )
