"""Compiled inner loop of the pair-consistency fixpoint."""

import numpy as np
from numba import njit


@njit(cache=True)
def _supported(mask, x, i, y, j):
    # (i, j) on (x, y) survives iff every z has a common c with (i,c) on (x,z), (j,c) on (y,z)
    n = mask.shape[0]
    words = mask.shape[3]
    for z in range(n):
        ok = False
        for w in range(words):
            if mask[x, z, i, w] & mask[y, z, j, w]:
                ok = True
                break
        if not ok:
            return False
    return True


@njit(cache=True)
def _diag_empty(mask, x):
    for i in range(mask.shape[2]):
        if mask[x, x, i, i >> 6] & (np.uint64(1) << np.uint64(i & 63)):
            return False
    return True


@njit(cache=True)
def pair_fixpoint(mask, active):
    """Shrink ``mask`` in place to the greatest pair-consistent sub-relation.

    ``mask[x, y, i]`` is a bitset over local indices of L(y); the diagonal
    ``mask[x, x]`` carries the unary list. Only pairs among ``active`` vertices
    are rechecked; the others must already be fixed. Returns False as soon as
    some unary list empties.
    """
    n_act = active.shape[0]
    dom = mask.shape[2]
    stamp = np.ones(mask.shape[0], dtype=np.int64)
    checked = np.zeros((n_act, n_act), dtype=np.int64)
    clock = 1
    changed = True
    while changed:
        changed = False
        for p in range(n_act):
            x = active[p]
            for q in range(p, n_act):
                y = active[q]
                if checked[p, q] > max(stamp[x], stamp[y]):
                    continue
                clock += 1
                checked[p, q] = clock
                removed = False
                for i in range(dom):
                    for j in range(dom):
                        wj = j >> 6
                        bj = np.uint64(1) << np.uint64(j & 63)
                        if not mask[x, y, i, wj] & bj:
                            continue
                        if not _supported(mask, x, i, y, j):
                            mask[x, y, i, wj] &= ~bj
                            wi = i >> 6
                            bi = np.uint64(1) << np.uint64(i & 63)
                            mask[y, x, j, wi] &= ~bi
                            removed = True
                if removed:
                    clock += 1
                    stamp[x] = clock
                    stamp[y] = clock
                    changed = True
                    if _diag_empty(mask, x) or _diag_empty(mask, y):
                        return False
    return True
