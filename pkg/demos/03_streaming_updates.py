"""Winner maintenance while the table drifts.

Alias and cumulative tables must be rebuilt whenever a weight changes.
The key race instead stores one winner per group and touches more than
that only when forced: a losing upsert costs a single comparison, and a
full group re-scan happens only when the winner row itself is re-keyed
downwards or deleted.
"""

import numpy as np

from keyrace import DynamicTable, Family, ModelSpec, SeedContext, UpdateCase

table = DynamicTable(ModelSpec(Family.GUMBEL1), SeedContext(seed=2))

print("building group 'doc7' one upsert at a time:")
for label, strength in [("news", 1.0), ("sport", 2.5), ("tech", 0.5)]:
    report = table.upsert("doc7", label, strength)
    w = report.winner
    print(f"  upsert {label:5s} -> case={report.case.value:16s} winner={w.label} key={w.key:+.3f}")

print("\na hopeless candidate costs exactly one comparison:")
report = table.upsert("doc7", "spam", -40.0)
print(f"  case={report.case.value} comparisons={report.comparisons} rescan={report.rescanned}")

print("\ndeleting a non-winner never re-scans:")
report = table.delete("doc7", "spam")
print(f"  case={report.case.value} comparisons={report.comparisons} rescan={report.rescanned}")

print("\ndeleting the winner forces one group-local re-scan:")
report = table.delete("doc7", table.winner("doc7").label)
print(f"  case={report.case.value} comparisons={report.comparisons} new winner={report.winner.label}")

# Cost profile of a random stream: most updates land in the cheap cases.
rng = np.random.default_rng(0)
table = DynamicTable(ModelSpec(Family.GUMBEL1), SeedContext(seed=3))
live: list[tuple[str, str]] = []
tallies: dict[UpdateCase, list[int]] = {}
for _ in range(20_000):
    if live and rng.random() < 0.25:
        gid, label = live.pop(int(rng.integers(len(live))))
        report = table.delete(gid, label)
    else:
        gid, label = f"g{rng.integers(100):03d}", f"q{rng.integers(25):02d}"
        report = table.upsert(gid, label, float(rng.normal()))
        if (gid, label) not in live:
            live.append((gid, label))
    tallies.setdefault(report.case, []).append(report.comparisons)

print("\n20k random updates, comparisons by case:")
for case, costs in sorted(tallies.items(), key=lambda kv: -len(kv[1])):
    print(
        f"  {case.value:18s} count={len(costs):6d} "
        f"mean-cmp={np.mean(costs):6.2f} max-cmp={max(costs)}"
    )
total = sum(len(c) for c in tallies.values())
cheap = sum(len(c) for case, c in tallies.items() if case not in
            (UpdateCase.WINNER_RESCAN, UpdateCase.DELETE_RESCAN))
print(f"  {cheap / total:.1%} of updates never re-scanned anything")
