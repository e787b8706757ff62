"""Preprocessing: arc and (2,3)-pair consistency, product components, twins.

Pair lists are kept as a dense bitset tensor. ``mask[x, y, i]`` is the set of
local indices ``j`` such that ``(dom[x][i], dom[y][j])`` is in L(x, y). Both
orientations are stored, and the diagonal ``mask[x, x]`` holds the unary list
(bit i set on row i iff ``dom[x][i]`` is still in L(x)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._kernels import pair_fixpoint
from .core import Instance

log = logging.getLogger(__name__)


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a bool array along its last axis into little-endian uint64 words."""
    width = bits.shape[-1]
    words = max(1, (width + 63) // 64)
    padded = np.zeros(bits.shape[:-1] + (words * 64,), dtype=bool)
    padded[..., :width] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return packed.view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, width: int) -> np.ndarray:
    raw = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :width].astype(bool)


@dataclass(frozen=True, eq=False)
class PairLists:
    """Immutable pair lists over fixed per-vertex domains ``dom``."""

    dom: tuple[tuple[int, ...], ...]
    mask: np.ndarray

    def __post_init__(self):
        self.mask.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.dom)

    def _index(self, x: int, a: int) -> int | None:
        try:
            return self.dom[x].index(a)
        except ValueError:
            return None

    def _bit(self, x: int, i: int, y: int, j: int) -> bool:
        return bool(int(self.mask[x, y, i, j >> 6]) >> (j & 63) & 1)

    def unary(self, x: int) -> frozenset[int]:
        return frozenset(a for i, a in enumerate(self.dom[x]) if self._bit(x, i, x, i))

    def lists(self) -> tuple[frozenset[int], ...]:
        return tuple(self.unary(x) for x in range(self.n))

    def has(self, x: int, a: int, y: int, b: int) -> bool:
        i, j = self._index(x, a), self._index(y, b)
        if i is None or j is None:
            return False
        if x == y:
            return i == j and self._bit(x, i, x, i)
        return self._bit(x, i, y, j)

    def pairs(self, x: int, y: int) -> set[tuple[int, int]]:
        """L(x, y) as value pairs. For x == y this is the diagonal of L(x)."""
        if x == y:
            return {(a, a) for a in self.unary(x)}
        bits = _unpack(self.mask[x, y], len(self.dom[y]))
        return {
            (self.dom[x][i], self.dom[y][j])
            for i, j in zip(*np.nonzero(bits[: len(self.dom[x])]))
        }

    def partners(self, x: int, a: int, y: int) -> frozenset[int]:
        """{b : (a, b) in L(x, y)}."""
        if x == y:
            return frozenset({a}) if a in self.unary(x) else frozenset()
        i = self._index(x, a)
        if i is None:
            return frozenset()
        bits = _unpack(self.mask[x, y, i], len(self.dom[y]))
        return frozenset(self.dom[y][j] for j in np.nonzero(bits)[0])

    def as_dict(self) -> dict[tuple[int, int], frozenset[tuple[int, int]]]:
        """Canonical view keyed by (x, y) with x < y, for comparisons in tests."""
        return {
            (x, y): frozenset(self.pairs(x, y))
            for x in range(self.n)
            for y in range(x + 1, self.n)
        }

    def same_as(self, other: PairLists) -> bool:
        return self.lists() == other.lists() and self.as_dict() == other.as_dict()

    def instance(self, inst: Instance) -> Instance:
        return inst.with_lists(self.lists())

    # -- derived pair lists ------------------------------------------------

    def _narrowed(self, keep: list[frozenset[int] | None]) -> PairLists | None:
        """Drop values outside ``keep[x]`` (None = keep all) and re-run the fixpoint."""
        mask = self.mask.copy()
        for x, allowed in enumerate(keep):
            if allowed is None:
                continue
            for i, a in enumerate(self.dom[x]):
                if a not in allowed:
                    mask[x, :, i, :] = 0
                    mask[:, x, :, i >> 6] &= ~np.uint64(1 << (i & 63))
        return _finish(self.dom, mask)

    def pin(self, x: int, a: int) -> PairLists | None:
        """Fixpoint of these pair lists with L(x) narrowed to {a}; None if infeasible."""
        keep: list[frozenset[int] | None] = [None] * self.n
        keep[x] = frozenset({a})
        return self._narrowed(keep)

    def remove(self, x: int, a: int) -> PairLists | None:
        keep: list[frozenset[int] | None] = [None] * self.n
        keep[x] = self.unary(x) - {a}
        return self._narrowed(keep)

    def restrict_lists(self, lists) -> PairLists | None:
        """Intersect the unary lists with ``lists`` and re-run the fixpoint."""
        return self._narrowed([frozenset(l) for l in lists])


def _finish(dom, mask) -> PairLists | None:
    n = len(dom)
    for x in range(n):
        diag = mask[x, x]
        if not any(int(diag[i, i >> 6]) >> (i & 63) & 1 for i in range(len(dom[x]))):
            return None
    if n and not pair_fixpoint(mask, np.arange(n, dtype=np.int64)):
        return None
    return PairLists(dom, mask)


def initial_mask(inst: Instance) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """Arc-consistent starting relation: all pairs compatible with the arcs between x and y."""
    g, h = inst.g, inst.h
    n = g.n
    dom = tuple(tuple(sorted(l)) for l in inst.lists)
    width = max([len(d) for d in dom] + [1])
    # index h.n is a dummy padding vertex with no arcs
    adj = np.zeros((h.n + 1, h.n + 1), dtype=bool)
    for a, b in h.arcs:
        adj[a, b] = True
    domarr = np.full((n, width), h.n, dtype=np.int64)
    valid = np.zeros((n, width), dtype=bool)
    for x, d in enumerate(dom):
        domarr[x, : len(d)] = d
        valid[x, : len(d)] = True
    garc = np.zeros((n, n), dtype=bool)
    for u, v in g.arcs:
        garc[u, v] = True

    fwd = adj[domarr[:, None, :, None], domarr[None, :, None, :]]
    rel = valid[:, None, :, None] & valid[None, :, None, :]
    rel &= ~garc[:, :, None, None] | fwd
    rel &= ~garc.T[:, :, None, None] | fwd.transpose(1, 0, 3, 2)
    # the diagonal pairs a with a only; a self-loop at x needs aa in A(H)
    eye = np.eye(width, dtype=bool)
    for x in range(n):
        rel[x, x] = eye & valid[x][:, None] & rel[x, x]
    return dom, _pack(rel)


def preprocess(inst: Instance, start: PairLists | None = None) -> PairLists | None:
    """Greatest arc- and pair-consistent pair lists, or None when infeasible.

    ``start`` may be an earlier fixpoint over the same domains whose unary lists
    contain ``inst.lists``; resuming from it gives the same result as starting
    from scratch and is much cheaper.
    """
    if start is not None:
        return start.restrict_lists(inst.lists)
    dom, mask = initial_mask(inst)
    return _finish(dom, mask)


def components(inst: Instance, pl: PairLists) -> list[Instance]:
    """Sub-instances from the weak components of the product restricted to ``pl``.

    G must be weakly connected (the solver splits G first). Every component that
    survives a fresh preprocess is returned with its lists; a component that
    misses some vertex of G cannot carry a full homomorphism and is dropped.
    """
    n = inst.g.n
    lists = pl.lists()
    nodes = [(x, a) for x in range(n) for a in sorted(lists[x])]
    index = {v: k for k, v in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for x, y in inst.g.arcs:
        for a in lists[x]:
            for b in inst.h.out_nbrs[a]:
                if b in lists[y]:
                    ra, rb = find(index[(x, a)]), find(index[(y, b)])
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[tuple[int, int]]] = {}
    for k, v in enumerate(nodes):
        groups.setdefault(find(k), []).append(v)

    out = []
    for root in sorted(groups):
        comp_lists: list[set[int]] = [set() for _ in range(n)]
        for x, a in groups[root]:
            comp_lists[x].add(a)
        if any(not l for l in comp_lists):
            log.debug("component at %s misses a vertex of G; dropped", nodes[root])
            continue
        sub = inst.with_lists(comp_lists)
        if preprocess(sub, start=pl) is None:
            log.debug("component at %s fails preprocessing; dropped", nodes[root])
            continue
        out.append(sub)
    return out


def _twin_signature(inst: Instance, x: int, a: int, lists) -> tuple:
    g, h = inst.g, inst.h
    outs = tuple(frozenset(b for b in h.out_nbrs[a] if b in lists[y]) for y in g.out_nbrs[x])
    ins = tuple(frozenset(b for b in h.in_nbrs[a] if b in lists[y]) for y in g.in_nbrs[x])
    loop = h.has_arc(a, a) if g.has_arc(x, x) else None
    return outs, ins, loop


def remove_twins(inst: Instance, pl: PairLists | None = None) -> Instance:
    """Drop, at every x, each value whose neighbourhoods into the lists of x's
    neighbours match those of a smaller value still present."""
    lists = [set(l) for l in (pl.lists() if pl is not None else inst.lists)]
    changed = True
    while changed:
        changed = False
        for x in range(inst.g.n):
            seen: dict[tuple, int] = {}
            for a in sorted(lists[x]):
                sig = _twin_signature(inst, x, a, lists)
                if sig in seen:
                    lists[x].discard(a)
                    changed = True
                else:
                    seen[sig] = a
    return inst.with_lists(lists)


def pair_consistent(inst: Instance, pl: PairLists) -> bool:
    """Independent check that ``pl`` is arc- and pair-consistent for ``inst``."""
    n = inst.g.n
    lists = pl.lists()
    rel = {(x, y): pl.pairs(x, y) for x in range(n) for y in range(n)}
    for x, y in inst.g.arcs:
        if any((a, b) not in inst.h.arcs for a, b in rel[(x, y)]):
            return False
    for (x, y), pairs in rel.items():
        for a, b in pairs:
            if a not in lists[x] or b not in lists[y]:
                return False
            for z in range(n):
                if not any((a, c) in rel[(x, z)] and (c, b) in rel[(z, y)] for c in lists[z]):
                    return False
    return True

