"""Compare the solver with exhaustive search on random Maltsev instances.

Run: python3 demos/cross_validate.py [count]
"""

import sys
import time

from maltsev_lhom.core import verify_homomorphism
from maltsev_lhom.generators import random_instance
from maltsev_lhom.oracle import BudgetExceeded, brute_force_hom, brute_force_list_maltsev
from maltsev_lhom.solver import SolverStats, remove_minority

count = int(sys.argv[1]) if len(sys.argv) > 1 else 60
modes = ("uniform", "planted", "affine")
agree = skipped = homs = 0
stats = SolverStats()
t0 = time.perf_counter()
for seed in range(count):
    inst = random_instance(seed, modes[seed % 3])
    try:
        if brute_force_list_maltsev(inst, budget=200_000) is None:
            skipped += 1
            continue
    except BudgetExceeded:
        skipped += 1
        continue
    f = remove_minority(inst, stats=stats)
    truth = brute_force_hom(inst)
    assert (f is None) == (truth is None), seed
    if f is not None:
        assert verify_homomorphism(inst, f)
        homs += 1
    agree += 1
print(f"{agree} Maltsev instances agree with the oracle ({homs} HOM), {skipped} skipped as non-Maltsev or too large")
print(f"solver calls {stats.calls}, regions built {stats.sym_dif_calls}, memo hits {stats.memo_hits}")
print(f"{time.perf_counter() - t0:.1f}s")
