"""Brute-force ground truth. Nothing here shares code with the solver.

Every search takes a node budget and raises ``BudgetExceeded`` instead of
returning a truncated answer. Search orders are lexicographic so a failing
seed reproduces exactly.
"""

from __future__ import annotations

import itertools
import os
from collections import deque

from .core import Instance, verify_homomorphism
from .reductions import Hypergraph, TernaryTable

DEFAULT_BUDGET = int(os.environ.get("MALTSEV_HOM_BUDGET", 10**7))


class BudgetExceeded(RuntimeError):
    """An oracle search visited more nodes than allowed."""


def brute_force_hom(inst: Instance, budget: int | None = None) -> tuple[int, ...] | None:
    """Some list homomorphism, found by plain backtracking, or None."""
    budget = DEFAULT_BUDGET if budget is None else budget
    g, h = inst.g, inst.h
    n = g.n
    if any(not l for l in inst.lists):
        return None
    choices = [sorted(l) for l in inst.lists]
    f = [-1] * n
    nodes = 0

    def ok(x, a):
        for y in g.out_nbrs[x]:
            if y <= x and (a, a if y == x else f[y]) not in h.arcs:
                return False
        for y in g.in_nbrs[x]:
            if y < x and (f[y], a) not in h.arcs:
                return False
        return True

    def go(x):
        nonlocal nodes
        if x == n:
            return True
        for a in choices[x]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"brute_force_hom: more than {budget} nodes")
            if ok(x, a):
                f[x] = a
                if go(x + 1):
                    return True
        f[x] = -1
        return False

    if go(0):
        result = tuple(f)
        assert verify_homomorphism(inst, result)
        return result
    return None


def all_homs(inst: Instance, budget: int | None = None) -> list[tuple[int, ...]]:
    """Every list homomorphism, by enumerating the full product of lists."""
    budget = DEFAULT_BUDGET if budget is None else budget
    total = 1
    for l in inst.lists:
        total *= len(l)
    if total > budget:
        raise BudgetExceeded(f"all_homs: {total} maps exceed budget {budget}")
    return [
        f
        for f in itertools.product(*(sorted(l) for l in inst.lists))
        if verify_homomorphism(inst, f)
    ]


def brute_force_pairs(inst: Instance) -> tuple[list[set[int]], dict[tuple[int, int], set[tuple[int, int]]]] | None:
    """Naive greatest arc- and pair-consistent fixpoint.

    Returns ``(lists, pairs)`` where ``pairs[(x, y)]`` is defined for every
    ordered pair including x == y (the diagonal), or None when some list empties.
    """
    g, h = inst.g, inst.h
    n = g.n
    lists = [set(l) for l in inst.lists]
    rel: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for x in range(n):
        rel[(x, x)] = {(a, a) for a in lists[x] if (x, x) not in g.arcs or (a, a) in h.arcs}
        for y in range(n):
            if x == y:
                continue
            rel[(x, y)] = {
                (a, b)
                for a in lists[x]
                for b in lists[y]
                if ((x, y) not in g.arcs or (a, b) in h.arcs)
                and ((y, x) not in g.arcs or (b, a) in h.arcs)
            }
    changed = True
    while changed:
        changed = False
        for (x, y), pairs in rel.items():
            for a, b in sorted(pairs):
                for z in range(n):
                    if not any((a, c) in rel[(x, z)] and (c, b) in rel[(z, y)] for c in lists[z]):
                        pairs.discard((a, b))
                        rel[(y, x)].discard((b, a))
                        changed = True
                        break
        for x in range(n):
            lists[x] = {a for a, _ in rel[(x, x)]}
            if not lists[x]:
                return None
    return lists, rel


# -- list polymorphisms ---------------------------------------------------


class _BinaryCSP:
    """Tiny binary CSP with maintained arc consistency, used by the polymorphism oracles."""

    def __init__(self, domains: list[set[int]], budget: int):
        self.domains = domains
        self.cons: list[list[tuple[int, dict]]] = [[] for _ in domains]
        self.budget = budget
        self.nodes = 0

    def add(self, u: int, v: int, fwd: dict, rev: dict):
        # fwd[a]: values of v allowed when u = a; rev[b]: values of u allowed when v = b
        self.cons[v].append((u, fwd))
        self.cons[u].append((v, rev))

    def _propagate(self, doms, queue, trail=None) -> bool:
        # cons[v] lists the (u, allowed) constraints to revise when doms[v] shrinks;
        # every overwritten domain goes on ``trail`` so the caller can undo
        queue = deque(queue)
        while queue:
            v = queue.popleft()
            for u, allowed in self.cons[v]:
                supported = {a for a in doms[u] if allowed.get(a, set()) & doms[v]}
                if len(supported) != len(doms[u]):
                    if trail is not None:
                        trail.append((u, doms[u]))
                    doms[u] = supported
                    if not supported:
                        return False
                    queue.append(u)
        return True

    def solve(self) -> list[int] | None:
        doms = [set(d) for d in self.domains]
        if any(not d for d in doms):
            return None
        if not self._propagate(doms, range(len(doms))):
            return None
        return self._search(doms)

    @staticmethod
    def _pick(doms) -> int | None:
        best, size = None, 0
        for v, d in enumerate(doms):
            if len(d) > 1 and (best is None or len(d) < size):
                best, size = v, len(d)
        return best

    def _search(self, doms) -> list[int] | None:
        # one shared domain list with an undo trail; an explicit stack because
        # the search can be deeper than the interpreter's recursion limit
        trail: list[tuple[int, set[int]]] = []
        v = self._pick(doms)
        if v is None:
            return [next(iter(d)) for d in doms]
        stack = [(v, iter(sorted(doms[v])), len(trail))]
        while stack:
            v, values, mark = stack[-1]
            while len(trail) > mark:
                u, old = trail.pop()
                doms[u] = old
            a = next(values, None)
            if a is None:
                stack.pop()
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(f"polymorphism search: more than {self.budget} nodes")
            trail.append((v, doms[v]))
            doms[v] = {a}
            if not self._propagate(doms, [v], trail):
                continue
            nxt = self._pick(doms)
            if nxt is None:
                return [next(iter(d)) for d in doms]
            stack.append((nxt, iter(sorted(doms[nxt])), len(trail)))
        return None


def _list_polymorphism(inst: Instance, pinned, budget: int | None) -> dict | None:
    budget = DEFAULT_BUDGET if budget is None else budget
    g, h = inst.g, inst.h
    keys: list[tuple[int, int, int, int]] = []
    domains: list[set[int]] = []
    for x in range(g.n):
        lx = sorted(inst.lists[x])
        for a, b, c in itertools.product(lx, repeat=3):
            keys.append((x, a, b, c))
            forced = pinned(a, b, c)
            domains.append(set(inst.lists[x]) if forced is None else {forced} & inst.lists[x])
    index = {k: i for i, k in enumerate(keys)}
    csp = _BinaryCSP(domains, budget)
    out = {a: set(h.out_nbrs[a]) for a in range(h.n)}
    inn = {a: set(h.in_nbrs[a]) for a in range(h.n)}
    for x, y in sorted(g.arcs):
        lx, ly = sorted(inst.lists[x]), sorted(inst.lists[y])
        for a, b, c in itertools.product(lx, repeat=3):
            for a2 in inst.h.out_nbrs[a]:
                if a2 not in inst.lists[y]:
                    continue
                for b2 in out[b] & set(ly):
                    for c2 in out[c] & set(ly):
                        u, v = index[(x, a, b, c)], index[(y, a2, b2, c2)]
                        if u == v:
                            # a self-loop arc maps a triple to itself: value must carry a loop
                            csp.domains[u] = {d for d in csp.domains[u] if (d, d) in h.arcs}
                            continue
                        csp.add(u, v, out, inn)
    sol = csp.solve()
    if sol is None:
        return None
    return {k: sol[i] for i, k in enumerate(keys)}


def _maltsev_pin(a, b, c):
    if b == c:
        return a
    if a == b:
        return c
    return None


def _majority_pin(a, b, c):
    if a == b or a == c:
        return a
    if b == c:
        return b
    return None


def brute_force_list_maltsev(inst: Instance, budget: int | None = None) -> dict | None:
    """A Maltsev list polymorphism ``{(x, a, b, c): value}`` or None."""
    return _list_polymorphism(inst, _maltsev_pin, budget)


def brute_force_list_majority(inst: Instance, budget: int | None = None) -> dict | None:
    """A majority list polymorphism ``{(x, a, b, c): value}`` or None."""
    return _list_polymorphism(inst, _majority_pin, budget)


def verify_list_polymorphism(inst: Instance, poly: dict, kind: str = "maltsev") -> bool:
    """Direct check of adjacency, list closure and the identities of ``kind``."""
    pin = _maltsev_pin if kind == "maltsev" else _majority_pin
    g, h = inst.g, inst.h
    for x in range(g.n):
        for a, b, c in itertools.product(sorted(inst.lists[x]), repeat=3):
            v = poly.get((x, a, b, c))
            if v is None or v not in inst.lists[x]:
                return False
            forced = pin(a, b, c)
            if forced is not None and v != forced:
                return False
    for x, y in g.arcs:
        for a, b, c in itertools.product(sorted(inst.lists[x]), repeat=3):
            for a2, b2, c2 in itertools.product(sorted(inst.lists[y]), repeat=3):
                if (a, a2) in h.arcs and (b, b2) in h.arcs and (c, c2) in h.arcs:
                    if (poly[(x, a, b, c)], poly[(y, a2, b2, c2)]) not in h.arcs:
                        return False
    return True


# -- hypergraph Maltsev ---------------------------------------------------


def verify_maltsev_table(hg: Hypergraph, table: TernaryTable) -> bool:
    """Maltsev identities on all of A^3 and coordinatewise closure on every block."""
    dom = range(hg.domain)
    for a, b in itertools.product(dom, repeat=2):
        if table.get(a, b, b) != a or table.get(b, b, a) != a:
            return False
    for a, b, c in itertools.product(dom, repeat=3):
        if table.get(a, b, c) is None:
            return False
    for block in hg.blocks:
        members = set(block.tuples)
        for t1, t2, t3 in itertools.product(block.tuples, repeat=3):
            image = tuple(table.get(p, q, r) for p, q, r in zip(t1, t2, t3))
            if image not in members:
                return False
    return True


def brute_force_hypergraph_maltsev(hg: Hypergraph, budget: int | None = None) -> TernaryTable | None:
    """Backtracking over tables A^3 -> A with identities pinned and closure checked early."""
    budget = DEFAULT_BUDGET if budget is None else budget
    k = hg.domain
    cells = list(itertools.product(range(k), repeat=3))
    value: dict[tuple[int, int, int], int] = {}
    for a, b, c in cells:
        forced = _maltsev_pin(a, b, c)
        if forced is not None:
            value[(a, b, c)] = forced
    free = [t for t in cells if t not in value]

    # every triple of same-block tuples is a closure constraint on its column cells
    constraints: list[tuple[tuple, frozenset]] = []
    watch: dict[tuple[int, int, int], list[int]] = {t: [] for t in free}
    for block in hg.blocks:
        members = frozenset(block.tuples)
        for t1, t2, t3 in itertools.product(block.tuples, repeat=3):
            cols = tuple(zip(t1, t2, t3))
            ci = len(constraints)
            constraints.append((cols, members))
            for col in set(cols):
                if col in watch:
                    watch[col].append(ci)

    def consistent(ci) -> bool:
        cols, members = constraints[ci]
        partial = [value.get(col) for col in cols]
        return any(
            all(p is None or p == m for p, m in zip(partial, t)) for t in members
        )

    for ci in range(len(constraints)):
        if not consistent(ci):
            return None

    nodes = 0

    def go(i) -> bool:
        nonlocal nodes
        if i == len(free):
            return True
        cell = free[i]
        for v in range(k):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"hypergraph Maltsev search: more than {budget} nodes")
            value[cell] = v
            if all(consistent(ci) for ci in watch[cell]) and go(i + 1):
                return True
        del value[cell]
        return False

    if not go(0):
        return None
    table = TernaryTable.from_dict(k, value)
    assert verify_maltsev_table(hg, table)
    return table


def brute_force_hyper_hom(hi, budget: int | None = None) -> dict[int, int] | None:
    """Element assignment sending every source edge into its list, by backtracking over edges."""
    budget = DEFAULT_BUDGET if budget is None else budget
    assign: dict[int, int] = {}
    nodes = 0

    def go(k) -> bool:
        nonlocal nodes
        if k == len(hi.source):
            return True
        edge = hi.source[k]
        for t in hi.lists[k]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"hypergraph hom search: more than {budget} nodes")
            added = []
            ok = True
            for x, v in zip(edge, t):
                if x in assign:
                    if assign[x] != v:
                        ok = False
                        break
                else:
                    assign[x] = v
                    added.append(x)
            if ok and go(k + 1):
                return True
            for x in added:
                del assign[x]
        return False

    return dict(assign) if go(0) else None
