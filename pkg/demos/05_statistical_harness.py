"""The goodness-of-fit machinery that certifies the samplers.

Chi-square (own incomplete-gamma kernel) for discrete winner tallies,
Kolmogorov-Smirnov (asymptotic series) for the continuous key laws, and
the replicated choice experiment that ties them to the samplers.
"""

import numpy as np

from keyrace import (
    Family,
    ModelSpec,
    key_canonical,
    ks_one_sample,
    ks_two_sample,
    replicate_uniforms,
    run_choice_experiment,
)

# --- chi-square on winner tallies ------------------------------------
spec = ModelSpec(Family.CANONICAL)
report = run_choice_experiment(spec, [1.0, 2.0, 3.0], replicates=60_000, seed=1)
print(f"choice experiment (1,2,3): stat={report.statistic:.3f} df={report.df} p={report.p_value:.3f}")

# re-test the same tallies against a wrong null to show the power
from keyrace import chi_square_gof
from keyrace.sampler import replicate_winners

counts = np.bincount(replicate_winners(spec, ["a", "b", "c"], [1.0, 2.0, 3.0], 1, 60_000))
bad = chi_square_gof(counts, [0.25, 0.35, 0.40])
print(f"same counts vs a wrong null:  stat={bad.statistic:.1f} p={bad.p_value:.2e} (rejected)")

# --- one-sample KS: the key law itself --------------------------------
u = replicate_uniforms(seed=2, group_id="demo", label="x", n_replicates=10_000)
keys = key_canonical(3.0, u)
good = ks_one_sample(keys, lambda t: np.clip(t, 0, 1) ** 3)
bad = ks_one_sample(keys, lambda t: np.clip(t, 0, 1) ** 2)
print(f"\nkeys(a=3) vs t^3: D={good.statistic:.4f} p={good.p_value:.3f}")
print(f"keys(a=3) vs t^2: D={bad.statistic:.4f} p={bad.p_value:.2e} (rejected)")

# --- two-sample KS: the merge property --------------------------------
# max(X_1, X_2) with weights 1 and 2 must be indistinguishable from a
# single weight-3 draw; that identity is what makes the race associative.
n = 20_000
u1 = replicate_uniforms(3, "demo", "a", n)
u2 = replicate_uniforms(3, "demo", "b", n)
u3 = replicate_uniforms(3, "demo", "c", n)
merged = np.maximum(key_canonical(1.0, u1), key_canonical(2.0, u2))
direct = key_canonical(3.0, u3)
report = ks_two_sample(merged, direct)
print(f"\nmax(X1, X2) vs X3: D={report.statistic:.4f} p={report.p_value:.3f}")
control = ks_two_sample(key_canonical(1.0, u1), key_canonical(4.0, u3))
print(f"X1 vs X4 control:  D={control.statistic:.4f} p={control.p_value:.2e} (rejected)")
