"""The minority-removal solver.

For each vertex x with two candidate values a, b the solver builds a smaller
instance around x (grown from the vertices whose a- and b-restrictions differ),
solves it recursively with x pinned to a, and drops a or b depending on the
answer. The result is exact whenever the instance has a Maltsev list
polymorphism; on any other input a returned map is still verified, so the
solver is sound but may miss solutions.
"""

from __future__ import annotations

import itertools
import logging
import sys
from dataclasses import dataclass, field

from .consistency import PairLists, components, preprocess, remove_twins
from .core import Instance, verify_homomorphism

log = logging.getLogger(__name__)


@dataclass
class SolverStats:
    """Counters and, in debug mode, every invariant violation observed."""

    calls: int = 0
    memo_hits: int = 0
    sym_dif_calls: int = 0
    witnesses: int = 0
    max_depth: int = 0
    violations: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SymDifRegion:
    """Vertex set of the smaller instance, its final boundary, and lists for it."""

    anchor: tuple[int, int, int]
    vertices: frozenset[int]
    boundary: frozenset[int]
    lists: dict[int, frozenset[int]]

    def instance(self, inst: Instance) -> tuple[Instance, list[int]]:
        order = sorted(self.vertices)
        return inst.induced(order, [self.lists[y] for y in order]), order


@dataclass(frozen=True)
class Witness:
    u: int
    c1: int
    c2: int
    v: int
    d1: int
    d2: int


def restrict(pl: PairLists, x: int, a: int) -> PairLists | None:
    """Pair lists with x pinned to a, closed under pair consistency.

    None stands for the all-empty restriction.
    """
    if a not in pl.unary(x):
        return None
    return pl.pin(x, a)


def _unary(r: PairLists | None, y: int) -> frozenset[int]:
    return frozenset() if r is None else r.unary(y)


def region_core(ra: PairLists | None, rb: PairLists | None, n: int) -> set[int]:
    """Vertices y where the a-restriction keeps a value the b-restriction drops."""
    return {y for y in range(n) if _unary(ra, y) - _unary(rb, y)}


def frontier(inst: Instance, core: set[int]) -> set[int]:
    """Vertices outside ``core`` joined to it by an arc in either direction."""
    out = set()
    for y in core:
        out |= inst.g.neighbors(y)
    return out - core


def build_region(inst: Instance, pl: PairLists, x: int, a: int, b: int) -> tuple[set[int], set[int]]:
    """(core, boundary) of the region anchored at x with values a, b."""
    core = region_core(restrict(pl, x, a), restrict(pl, x, b), inst.g.n)
    return core, frontier(inst, core)


def witnesses_at(
    ra: PairLists | None, rb: PairLists | None, u: int, c1: int, c2: int, v: int
) -> list[tuple[int, int]]:
    """All (d1, d2) such that u, c1, c2 witness the anchor pair (ra, rb) at v."""
    if ra is None or rb is None or u == v:
        return []
    a1, a2 = ra.partners(u, c1, v), ra.partners(u, c2, v)
    b1, b2 = rb.partners(u, c1, v), rb.partners(u, c2, v)
    # (c1,d1),(c2,d2) only on the a side; (c1,d2),(c2,d1) only on the b side
    first = (a1 - b1) & (b2 - a2)
    second = (a2 - b2) & (b1 - a1)
    return [(d1, d2) for d1 in sorted(first) for d2 in sorted(second)]


def find_witness(
    boundary, base: PairLists, ra: PairLists | None, rb: PairLists | None, skip=frozenset(), reverse=False
) -> Witness | None:
    """First witness (u in boundary, c1 != c2 in base(u)) of the anchor pair, scanning in order."""
    us = sorted(boundary, reverse=reverse)
    for u in us:
        vals = sorted(base.unary(u), reverse=reverse)
        for c1, c2 in itertools.permutations(vals, 2):
            if (u, c1, c2) in skip:
                continue
            for v in us:
                found = witnesses_at(ra, rb, u, c1, c2, v)
                if found:
                    d1, d2 = found[0]
                    return Witness(u, c1, c2, v, d1, d2)
    return None


class _Restrictions:
    """Memo of pins of one base pair list."""

    def __init__(self, base: PairLists):
        self.base = base
        self.cache: dict[tuple[int, int], PairLists | None] = {}

    def __call__(self, y: int, c: int) -> PairLists | None:
        key = (y, c)
        if key not in self.cache:
            self.cache[key] = restrict(self.base, y, c)
        return self.cache[key]


def sym_dif(
    inst: Instance,
    pl: PairLists,
    x: int,
    a: int,
    b: int,
    *,
    push_both_witness_ends: bool = False,
    reverse_scan: bool = False,
    stats: SolverStats | None = None,
) -> SymDifRegion:
    """Grow the region around (x, a, b) until no boundary witness remains."""
    n = inst.g.n
    ra, rb = restrict(pl, x, a), restrict(pl, x, b)
    if ra is None:
        raise ValueError(f"value {a} at vertex {x} has an empty restriction")
    l1 = _Restrictions(ra)
    core = region_core(ra, rb, n)
    boundary = frontier(inst, core)
    stack = [(ra, rb)]
    visited = {(x, a, b)}

    def grow(u, c1, c2):
        nonlocal boundary
        if stats is not None:
            stats.witnesses += 1
        new_core = region_core(l1(u, c1), l1(u, c2), n)
        core.update(new_core)
        boundary = (boundary | frontier(inst, new_core)) - core
        visited.add((u, c1, c2))
        stack.append((l1(u, c1), l1(u, c2)))

    while stack:
        anchor_a, anchor_b = stack.pop()
        while True:
            w = find_witness(boundary, ra, anchor_a, anchor_b, skip=visited, reverse=reverse_scan)
            if w is None:
                break
            grow(w.u, w.c1, w.c2)
            if push_both_witness_ends and (w.v, w.d1, w.d2) not in visited:
                grow(w.v, w.d1, w.d2)
    lists = {y: ra.unary(y) for y in core}
    return SymDifRegion((x, a, b), frozenset(core), frozenset(boundary), lists)


def dichotomy_violations(inst: Instance, pl: PairLists, x: int, a: int, b: int) -> list[str]:
    """Check that, on the boundary, the a- and b-pair sets are equal or disjoint."""
    ra, rb = restrict(pl, x, a), restrict(pl, x, b)
    if ra is None or rb is None:
        return []
    _, boundary = build_region(inst, pl, x, a, b)
    bad = []
    for y in sorted(boundary):
        common = sorted(ra.unary(y) & rb.unary(y))
        for c1, c2 in itertools.permutations(common, 2):
            for z in sorted(boundary):
                pa = {
                    (d1, d2)
                    for d1 in ra.partners(y, c1, z)
                    for d2 in ra.partners(y, c2, z)
                }
                pb = {
                    (d1, d2)
                    for d1 in rb.partners(y, c1, z)
                    for d2 in rb.partners(y, c2, z)
                }
                if pa != pb and pa & pb:
                    bad.append(f"anchor {(x, a, b)}: y={y} c={(c1, c2)} z={z}")
    return bad


class _Solver:
    def __init__(self, h, *, push_both_witness_ends, reverse_scan, descending, debug, maltsev_confirmed, stats):
        self.h = h
        self.maltsev_confirmed = maltsev_confirmed
        self.push_both = push_both_witness_ends
        self.reverse_scan = reverse_scan
        self.descending = descending
        self.debug = debug
        self.stats = stats
        self.memo: dict[tuple, tuple[int, ...] | None] = {}
        self.depth = 0

    def _violation(self, msg: str):
        log.warning("invariant violated: %s", msg)
        self.stats.violations.append(msg)

    def solve(self, inst: Instance) -> tuple[int, ...] | None:
        key = inst.key()
        if key in self.memo:
            self.stats.memo_hits += 1
            return self.memo[key]
        self.stats.calls += 1
        self.depth += 1
        self.stats.max_depth = max(self.stats.max_depth, self.depth)
        try:
            result = self._solve(inst)
        finally:
            self.depth -= 1
        self.memo[key] = result
        return result

    def _solve(self, inst: Instance) -> tuple[int, ...] | None:
        n = inst.g.n
        if n == 0:
            return ()
        pl = preprocess(inst)
        if pl is None:
            return None
        parts = inst.g.weak_components()
        if len(parts) > 1:
            f = [-1] * n
            for part in parts:
                sub = inst.induced(part, [pl.unary(y) for y in part])
                g = self.solve(sub)
                if g is None:
                    return None
                for y, v in zip(part, g):
                    f[y] = v
            return tuple(f)
        for comp in components(inst, pl):
            f = self._solve_connected(comp)
            if f is not None:
                return f
        return None

    def _solve_connected(self, inst: Instance) -> tuple[int, ...] | None:
        pl = preprocess(inst)
        if pl is None:
            return None
        reduced = remove_twins(inst, pl)
        if reduced.lists != pl.lists():
            pl = preprocess(reduced, start=pl)
            if pl is None:
                return None
        for x in range(inst.g.n):
            while len(pl.unary(x)) > 1:
                a, b = sorted(pl.unary(x), reverse=self.descending)[:2]
                pl = self._step(inst, pl, x, a, b)
                if pl is None:
                    return None
        f = tuple(next(iter(pl.unary(x))) for x in range(inst.g.n))
        if not verify_homomorphism(inst, f):
            log.warning(
                "singleton lists do not form a homomorphism; the instance may lack a Maltsev list polymorphism"
            )
            return None
        return f

    def _step(self, inst: Instance, pl: PairLists, x: int, a: int, b: int) -> PairLists | None:
        """Decide between a and b at x and return the re-preprocessed pair lists."""
        if restrict(pl, x, a) is None:
            drop = a
        else:
            self.stats.sym_dif_calls += 1
            region = sym_dif(
                inst, pl, x, a, b,
                push_both_witness_ends=self.push_both,
                reverse_scan=self.reverse_scan,
                stats=self.stats,
            )
            sub, _ = region.instance(inst)
            if sub.list_total() >= pl_total(pl):
                self._violation(f"no progress at {(x, a, b)}")
            g = self.solve(sub)
            drop = a if g is None else b
        if self.debug:
            self._check_step(inst, pl, x, a, b, drop)
        return pl.remove(x, drop)

    def _check_step(self, inst, pl, x, a, b, drop):
        from .oracle import BudgetExceeded, brute_force_hom

        # the dichotomy is only promised when a Maltsev list polymorphism exists;
        # restrictions of such an instance inherit it
        if self.maltsev_confirmed:
            for msg in dichotomy_violations(inst, pl, x, a, b):
                self._violation("boundary dichotomy: " + msg)
        current = pl.instance(inst)
        try:
            before = brute_force_hom(current, budget=10**6)
            after = brute_force_hom(current.with_lists(
                [l - {drop} if y == x else l for y, l in enumerate(current.lists)]
            ), budget=10**6)
        except BudgetExceeded:
            return
        if before is not None and after is None:
            self._violation(f"removing {drop} at {x} lost every solution (anchor {(a, b)})")


def pl_total(pl: PairLists) -> int:
    return sum(len(l) for l in pl.lists())


def remove_minority(
    inst: Instance,
    *,
    push_both_witness_ends: bool = False,
    reverse_scan: bool = False,
    descending: bool = False,
    debug: bool = False,
    maltsev_confirmed: bool = False,
    stats: SolverStats | None = None,
) -> tuple[int, ...] | None:
    """A list homomorphism of ``inst`` or None.

    A returned map always verifies. None is exact when the instance has a
    Maltsev list polymorphism. ``debug`` runs oracle checks after every
    removal and records violations in ``stats``; ``maltsev_confirmed`` adds the
    boundary dichotomy check, which only holds on Maltsev instances.
    """
    stats = SolverStats() if stats is None else stats
    solver = _Solver(
        inst.h,
        push_both_witness_ends=push_both_witness_ends,
        reverse_scan=reverse_scan,
        descending=descending,
        debug=debug,
        maltsev_confirmed=maltsev_confirmed,
        stats=stats,
    )
    # each recursion level strips at least one list value
    limit = 4 * inst.list_total() + 200
    old = sys.getrecursionlimit()
    if limit > old:
        sys.setrecursionlimit(limit)
    try:
        f = solver.solve(inst)
    finally:
        sys.setrecursionlimit(old)
    if f is not None and not verify_homomorphism(inst, f):
        log.warning("assembled map fails verification; returning None")
        return None
    return f
