"""Run the three-step triple construction and report outcomes by family.

Run: python3 demos/conjecture_probe.py [count]
"""

import collections
import sys

from maltsev_lhom.conjecture import CounterexampleReport, NotApplicable, build_triple_maltsev
from maltsev_lhom.generators import random_instance

count = int(sys.argv[1]) if len(sys.argv) > 1 else 45
tally = collections.Counter()
for seed in range(count):
    mode = ("uniform", "planted", "affine")[seed % 3]
    try:
        res = build_triple_maltsev(random_instance(seed, mode))
    except NotApplicable:
        tally[mode, "not applicable"] += 1
        continue
    if isinstance(res, CounterexampleReport):
        tally[mode, "counterexample"] += 1
        print(f"seed {seed} ({mode}): {res.reason}")
    else:
        tally[mode, "verified"] += 1
for (mode, outcome), k in sorted(tally.items()):
    print(f"{mode:8} {outcome:15} {k}")
