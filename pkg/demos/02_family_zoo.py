"""The five key families and why they pick identical winners.

Every family maps (strength, uniform) to a key; racing the keys samples
a label with probability weight/sum(weights).  The families differ only
in how the weight is recorded:

  canonical   strength IS the weight          key = u**(1/a)
  gumbel1     strength = log-weight           key = s - log(-log u)
  frechet2    strength = weight               key = |s| / (-log u)
  negexp      strength = -1/weight            key = -|s| * (-log u)
  expmin      strength IS the weight (rate)   key = -log(u)/a, argMIN wins

Fed the *same* uniforms, all five are monotone transforms of each other,
so they crown the same winner row for row.
"""

import numpy as np

from keyrace import (
    Family,
    ModelSpec,
    alpha_to_strength,
    key_canonical,
    key_expmin,
    key_frechet2,
    key_gumbel1,
    key_negexp,
    replicate_winners,
)

rng = np.random.default_rng(7)
weights = np.array([0.5, 2.0, 4.0])
u = rng.uniform(0.01, 0.99, size=3)

print("weights:", weights, "  shared uniforms:", np.round(u, 4))
print(f"{'family':10s} {'keys':>38s}   winner")
races = {
    "canonical": (key_canonical(weights, u), np.argmax),
    "gumbel1": (key_gumbel1(np.log(weights), 1.0, u), np.argmax),
    "frechet2": (key_frechet2(weights, 1.0, u), np.argmax),
    "negexp": (key_negexp(-1.0 / weights, 1.0, u), np.argmax),
    "expmin": (key_expmin(weights, u), np.argmin),
}
for name, (keys, pick) in races.items():
    print(f"{name:10s} {np.array2string(keys, precision=4, floatmode='fixed'):>38s}   idx {pick(keys)}")

# Monte Carlo: each family reproduces weight-proportional frequencies.
n = 60_000
expected = weights / weights.sum()
print(f"\nwinner frequencies over {n} replicates (expected {np.round(expected, 4)}):")
for i, family in enumerate(Family):
    spec = ModelSpec(family)
    strengths = alpha_to_strength(spec, weights)
    winners = replicate_winners(spec, ["a", "b", "c"], strengths, seed=10 + i, n_replicates=n)
    freq = np.bincount(winners, minlength=3) / n
    print(f"  {family.value:10s} strengths={np.round(strengths, 3)!s:22s} freq={np.round(freq, 4)}")

# The additive family is the log-space workhorse: strengths that would
# overflow exp() race without ever being exponentiated.
big = np.array([700.0, 701.0, 702.0])  # exp(700) overflows float64
winners = replicate_winners(ModelSpec(Family.GUMBEL1), ["a", "b", "c"], big, seed=3, n_replicates=n)
print(
    "\nlog-space strengths (700, 701, 702), no overflow:",
    np.round(np.bincount(winners, minlength=3) / n, 4),
    "~ softmax(0,1,2) =",
    np.round(np.exp(big - 700) / np.exp(big - 700).sum(), 4),
)
