"""From hypergraph list homomorphisms and relational structures to digraph instances.

Two constructions live here. ``hyper_to_graph`` turns a hypergraph list
instance into a symmetric digraph list instance with one G-vertex per source
hyperedge. ``detection_instance`` builds the instance whose list homomorphisms
are exactly the Maltsev polymorphisms of a relational structure.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Digraph, Instance, verify_homomorphism

log = logging.getLogger(__name__)

Tup = tuple[int, ...]


class Conflict(ValueError):
    """Two hyperedges sharing an element were mapped to disagreeing values."""


class WellDefinednessConflict(ValueError):
    """Two triple-vertices assign different values to the same argument triple."""


@dataclass(frozen=True)
class Block:
    """A uniform relation: distinct tuples of one arity, kept sorted."""

    arity: int
    tuples: tuple[Tup, ...]

    def __post_init__(self):
        tuples = tuple(sorted({tuple(int(v) for v in t) for t in self.tuples}))
        for t in tuples:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} does not have arity {self.arity}")
        object.__setattr__(self, "tuples", tuples)


@dataclass(frozen=True)
class Hypergraph:
    """Ordered hyperedges over ``0..domain-1``, partitioned into uniform blocks."""

    domain: int
    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        for b in blocks:
            for t in b.tuples:
                if any(not 0 <= v < self.domain for v in t):
                    raise ValueError(f"tuple {t} leaves the domain 0..{self.domain - 1}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_relations(cls, domain: int, relations: Iterable[Iterable[Sequence[int]]]) -> Hypergraph:
        """One block per relation. Every relation must be non-empty to fix its arity."""
        blocks = []
        for rel in relations:
            rel = [tuple(t) for t in rel]
            if not rel:
                raise ValueError("an empty relation has no arity; pass Block(arity, ()) instead")
            blocks.append(Block(len(rel[0]), tuple(rel)))
        return cls(domain, tuple(blocks))

    @classmethod
    def from_edges(cls, domain: int, edges: Iterable[Sequence[int]]) -> Hypergraph:
        """Plain hypergraph: its blocks are the arity classes."""
        by_arity: dict[int, list[Tup]] = {}
        for e in edges:
            by_arity.setdefault(len(e), []).append(tuple(e))
        return cls(domain, tuple(Block(k, tuple(v)) for k, v in sorted(by_arity.items())))

    def edges(self) -> list[Tup]:
        return [t for b in self.blocks for t in b.tuples]


@dataclass(frozen=True)
class HyperInstance:
    """Source hyperedges with per-edge lists of same-arity target hyperedges.

    ``source`` is given as an explicit edge sequence (repeats are allowed, so a
    CSP can state two constraints on the same scope); ``lists[k]`` belongs to
    ``source[k]``.
    """

    elements: int
    source: tuple[Tup, ...]
    lists: tuple[tuple[Tup, ...], ...]

    def __post_init__(self):
        source = tuple(tuple(int(v) for v in e) for e in self.source)
        lists = tuple(tuple(sorted({tuple(t) for t in l})) for l in self.lists)
        if len(lists) != len(source):
            raise ValueError("one list per source hyperedge is required")
        for e, l in zip(source, lists):
            if any(not 0 <= v < self.elements for v in e):
                raise ValueError(f"hyperedge {e} leaves 0..{self.elements - 1}")
            for t in l:
                if len(t) != len(e):
                    raise ValueError(f"list tuple {t} has arity {len(t)}, hyperedge {e} has {len(e)}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "lists", lists)


def signature(t1: Sequence, t2: Sequence) -> frozenset[tuple[int, int]]:
    """Index pairs (0-based) on which the two tuples agree."""
    return frozenset(
        (i, j) for i, u in enumerate(t1) for j, v in enumerate(t2) if u == v
    )


def h_labels(hi: HyperInstance) -> list[tuple[int, Tup]]:
    """H-vertex id -> (source edge index, target tuple), in construction order."""
    return [(k, t) for k, l in enumerate(hi.lists) for t in l]


def hyper_to_graph(hi: HyperInstance) -> Instance:
    """Symmetric digraph list instance equivalent to ``hi``.

    G has a vertex per source edge and H a vertex per (edge, list tuple). Two
    G-vertices (possibly equal) are joined when their edges share an element;
    their list vertices are joined when the target tuples agree at least where
    the source edges do. An edge that repeats an element gets a loop, which
    keeps only tuples agreeing on the repeated positions.
    """
    labels = h_labels(hi)
    by_edge: list[list[int]] = [[] for _ in hi.source]
    for hid, (k, _) in enumerate(labels):
        by_edge[k].append(hid)
    g_arcs, h_arcs = set(), set()
    for p, q in itertools.combinations_with_replacement(range(len(hi.source)), 2):
        sig = signature(hi.source[p], hi.source[q])
        if not sig:
            continue
        if p == q and all(i == j for i, j in sig):
            # distinct elements: the loop would accept every tuple
            continue
        g_arcs.add((p, q))
        g_arcs.add((q, p))
        for u in by_edge[p]:
            for v in by_edge[q]:
                if sig <= signature(labels[u][1], labels[v][1]):
                    h_arcs.add((u, v))
                    h_arcs.add((v, u))
    g = Digraph(len(hi.source), frozenset(g_arcs))
    h = Digraph(len(labels), frozenset(h_arcs))
    return Instance(g, h, tuple(frozenset(ids) for ids in by_edge))


def pull_back(hi: HyperInstance, f: Sequence[int]) -> dict[int, int]:
    """Element assignment read off a homomorphism of the reduced instance."""
    labels = h_labels(hi)
    out: dict[int, int] = {}
    for k, e in enumerate(hi.source):
        edge_idx, t = labels[f[k]]
        if edge_idx != k:
            raise Conflict(f"G-vertex {k} mapped outside its own list")
        for x, v in zip(e, t):
            if out.setdefault(x, v) != v:
                raise Conflict(f"element {x} receives both {out[x]} and {v}")
    return out


def satisfies(hi: HyperInstance, assignment: dict[int, int]) -> bool:
    """Every source edge lands on a tuple of its list."""
    for e, l in zip(hi.source, hi.lists):
        try:
            image = tuple(assignment[x] for x in e)
        except KeyError:
            return False
        if image not in l:
            return False
    return True


# -- Maltsev detection ------------------------------------------------------


@dataclass(frozen=True)
class TernaryTable:
    """Partial operation A^3 -> A, flat in lexicographic order, -1 = undefined."""

    domain: int
    entries: tuple[int, ...]

    def __post_init__(self):
        k = self.domain
        if len(self.entries) != k**3:
            raise ValueError(f"expected {k**3} entries, got {len(self.entries)}")
        for a, b in itertools.product(range(k), repeat=2):
            for cell in ((a, b, b), (b, b, a)):
                v = self.get(*cell)
                if v is not None and v != a:
                    raise ValueError(f"h{cell} = {v} breaks the Maltsev identities")

    def _pos(self, a: int, b: int, c: int) -> int:
        return (a * self.domain + b) * self.domain + c

    def get(self, a: int, b: int, c: int) -> int | None:
        v = self.entries[self._pos(a, b, c)]
        return None if v < 0 else v

    @classmethod
    def from_dict(cls, domain: int, values: dict) -> TernaryTable:
        entries = [-1] * domain**3
        for (a, b, c), v in values.items():
            entries[(a * domain + b) * domain + c] = v
        return cls(domain, tuple(entries))

    @classmethod
    def affine(cls, domain: int) -> TernaryTable:
        """a - b + c modulo the domain size."""
        return cls.from_dict(
            domain,
            {t: (t[0] - t[1] + t[2]) % domain for t in itertools.product(range(domain), repeat=3)},
        )

    def completed(self) -> TernaryTable:
        """Fill undefined cells: the identities where they apply, else the first argument."""
        values = {}
        for a, b, c in itertools.product(range(self.domain), repeat=3):
            v = self.get(a, b, c)
            if v is None:
                v = c if a == b else a
            values[(a, b, c)] = v
        return TernaryTable.from_dict(self.domain, values)

    def is_total(self) -> bool:
        return all(v >= 0 for v in self.entries)

    def rows(self) -> list[tuple[int, int, int, int]]:
        return [
            (a, b, c, self.get(a, b, c))
            for a, b, c in itertools.product(range(self.domain), repeat=3)
            if self.get(a, b, c) is not None
        ]


def _encode(col: tuple[int, int, int], k: int) -> int:
    return (col[0] * k + col[1]) * k + col[2]


def _decode(code: int, k: int) -> tuple[int, int, int]:
    return code // (k * k), code // k % k, code % k


def allowed_images(block: Block, a: Tup, b: Tup, c: Tup) -> tuple[Tup, ...]:
    """Tuples of the block a Maltsev operation may send the triple (a, b, c) to."""
    out = []
    for t in block.tuples:
        ok = True
        for i in range(block.arity):
            if a[i] == b[i] and t[i] != c[i]:
                ok = False
            elif b[i] == c[i] and t[i] != a[i]:
                ok = False
            if not ok:
                break
        if ok:
            out.append(t)
    return tuple(out)


def detection_triples(hg: Hypergraph) -> list[tuple[int, Tup, Tup, Tup]]:
    """(block index, a, b, c) for every ordered triple of same-block tuples."""
    return [
        (bi, a, b, c)
        for bi, block in enumerate(hg.blocks)
        for a, b, c in itertools.product(block.tuples, repeat=3)
    ]


def detection_hyper_instance(hg: Hypergraph) -> HyperInstance:
    """Columns of each tuple triple become elements (argument triples of the operation)."""
    k = hg.domain
    source, lists = [], []
    for bi, a, b, c in detection_triples(hg):
        source.append(tuple(_encode(col, k) for col in zip(a, b, c)))
        lists.append(allowed_images(hg.blocks[bi], a, b, c))
    return HyperInstance(max(1, k**3), tuple(source), tuple(lists))


def detection_instance(hg: Hypergraph) -> Instance:
    """Digraph list instance with a homomorphism iff ``hg`` has a Maltsev polymorphism."""
    return hyper_to_graph(detection_hyper_instance(hg))


def extract_maltsev(hg: Hypergraph, f: Sequence[int]) -> TernaryTable:
    """Read the operation off a homomorphism of ``detection_instance(hg)`` and complete it."""
    hi = detection_hyper_instance(hg)
    try:
        assignment = pull_back(hi, f)
    except Conflict as exc:
        raise WellDefinednessConflict(str(exc)) from exc
    values = {_decode(code, hg.domain): v for code, v in assignment.items()}
    return TernaryTable.from_dict(hg.domain, values).completed()


def detect_maltsev(hg: Hypergraph, **solver_options) -> TernaryTable | None:
    """A verified Maltsev polymorphism of ``hg``, or None when there is none."""
    from .oracle import verify_maltsev_table
    from .solver import remove_minority

    inst = detection_instance(hg)
    log.debug("detection instance: |G|=%d |H|=%d", inst.g.n, inst.h.n)
    f = remove_minority(inst, **solver_options)
    if f is None:
        return None
    assert verify_homomorphism(inst, f)
    table = extract_maltsev(hg, f)
    if not verify_maltsev_table(hg, table):
        raise WellDefinednessConflict("extracted table fails verification")
    return table
