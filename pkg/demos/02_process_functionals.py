# Process functionals and tail flattening.
#
# Profiles are finite prefixes plus a constant tail; the expected value,
# investment, welfare, and incentive cost all close geometrically.
# Flattening a profile's tail preserves the expected value while lowering
# both the investment and the incentive cost, which is why the optimal
# programs only ever need constant or near-constant profiles.
from seqinvest import (
    ConstantTailProfile,
    constant_profile,
    flatten_tail,
    functionals,
    sqrt_ratio,
)

sr = sqrt_ratio()


def show(label, x):
    f = functionals(sr, x)
    print(
        f"{label:28s} V={f.value:.6f}  I={f.investment:.6f}"
        f"  W={f.welfare:.6f}  G={f.incentive_cost:.6f}"
    )


print("constant profiles:")
for c in (0.05, 0.1111, 0.25):
    show(f"  all agents at {c:g}", constant_profile(c))

print()
print("a lumpy profile and its flattenings (same expected value):")
x = ConstantTailProfile((0.013094524347364401, 0.31063262881172208), 0.17767002726557623)
show("  original", x)
for k in (2, 1, 0):
    flat = flatten_tail(sr, x, k)
    show(f"  flattened from agent {k}", flat)

print()
print("note: investment and incentive cost only ever fall, value is fixed;")
print("the welfare-maximizing constant (first best) is 1/9 for this family:")
show("  first best", constant_profile(1.0 / 9.0))
