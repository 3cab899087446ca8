# Monte Carlo validation of the closed forms.
#
# A seeded million-episode run reproduces the expected value, investment,
# welfare, and per-agent payoffs within sampling error; reruns on the
# same seed are bit-identical, and shards merge deterministically.
from seqinvest import (
    SimulationConfig,
    constant_profile,
    equal_split,
    expected_investment,
    expected_payoff,
    expected_value,
    expected_welfare,
    socially_optimal,
    sqrt_ratio,
    summarize,
)

sr = sqrt_ratio()
c_star = socially_optimal(sr).profile.tail
profile = constant_profile(c_star)
rule = equal_split()

config = SimulationConfig(episodes=1_000_000, seed=2024, shards=4)
summary = summarize(sr, profile, rule, config)

print(f"equal split at the social optimum, {config.episodes:,} episodes, seed {config.seed}")
print(f"{'statistic':18s} {'simulated':>12s} {'closed form':>12s} {'|diff|/se':>10s}")
rows = [
    ("value", summary.total_value, expected_value(sr, profile)),
    ("investment", summary.total_investment, expected_investment(sr, profile)),
    ("welfare", summary.welfare, expected_welfare(sr, profile)),
]
for name, stat, truth in rows:
    z = abs(stat.mean - truth) / stat.se
    print(f"{name:18s} {stat.mean:12.6f} {truth:12.6f} {z:10.2f}")
for pay in summary.payoffs[:3]:
    truth = expected_payoff(sr, rule, profile, pay.agent)
    z = abs(pay.mean - truth) / pay.se
    print(f"payoff agent {pay.agent:<5d} {pay.mean:12.6f} {truth:12.6f} {z:10.2f}")

print()
print("chain-length distribution (geometric):")
total = sum(summary.histogram)
for k, count in enumerate(summary.histogram[:8]):
    bar = "#" * int(60 * count / total)
    print(f"  k={k:2d}  {count:8d}  {bar}")

again = summarize(sr, profile, rule, config)
print()
print("rerun on the same seed is bit-identical:", summary == again)
