"""Digraphs, list-homomorphism instances, oriented walks and the list product."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

Arc = tuple[int, int]
# A homomorphism is stored as a total map: position x holds the image of x.
Homomorphism = tuple[int, ...]


@dataclass(frozen=True)
class Digraph:
    """Digraph on vertices ``0..n-1``. Self-loops are allowed."""

    n: int
    arcs: frozenset[Arc] = frozenset()
    out_nbrs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    in_nbrs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        for u, v in arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u}, {v}) out of range for n={self.n}")
        outs: list[list[int]] = [[] for _ in range(self.n)]
        ins: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(arcs):
            outs[u].append(v)
            ins[v].append(u)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "out_nbrs", tuple(map(tuple, outs)))
        object.__setattr__(self, "in_nbrs", tuple(map(tuple, ins)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Arc]) -> Digraph:
        """Undirected edges, each realised as a symmetric pair of arcs."""
        arcs = set()
        for u, v in edges:
            arcs.add((u, v))
            arcs.add((v, u))
        return cls(n, frozenset(arcs))

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def neighbors(self, u: int) -> set[int]:
        return set(self.out_nbrs[u]) | set(self.in_nbrs[u])

    def induced(self, vertices: Sequence[int]) -> Digraph:
        """Induced subgraph, relabelled so ``vertices[i]`` becomes ``i``."""
        index = {v: i for i, v in enumerate(vertices)}
        arcs = {
            (index[u], index[v])
            for u, v in self.arcs
            if u in index and v in index
        }
        return Digraph(len(vertices), frozenset(arcs))

    def weak_components(self) -> list[list[int]]:
        """Weakly connected components, each sorted, ordered by smallest vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.out_nbrs[u] + self.in_nbrs[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps


@dataclass(frozen=True)
class Instance:
    """A list-homomorphism instance ``(G, H, L)``.

    ``lists[x]`` is the set of allowed images of ``x``; an empty list is legal
    and simply makes the instance infeasible.
    """

    g: Digraph
    h: Digraph
    lists: tuple[frozenset[int], ...]

    def __post_init__(self):
        lists = tuple(frozenset(int(a) for a in lst) for lst in self.lists)
        if len(lists) != self.g.n:
            raise ValueError(f"expected {self.g.n} lists, got {len(lists)}")
        for x, lst in enumerate(lists):
            for a in lst:
                if not 0 <= a < self.h.n:
                    raise ValueError(f"L({x}) contains {a}, not a vertex of H")
        object.__setattr__(self, "lists", lists)

    @classmethod
    def full_lists(cls, g: Digraph, h: Digraph) -> Instance:
        return cls(g, h, tuple(frozenset(range(h.n)) for _ in range(g.n)))

    def with_lists(self, lists: Sequence[Iterable[int]]) -> Instance:
        return Instance(self.g, self.h, tuple(frozenset(l) for l in lists))

    def pin(self, x: int, a: int) -> Instance:
        """Same instance with ``L(x)`` replaced by ``{a}`` (or emptied if a is not in it)."""
        lists = list(self.lists)
        lists[x] = frozenset({a}) & self.lists[x]
        return Instance(self.g, self.h, tuple(lists))

    def induced(self, vertices: Sequence[int], lists: Sequence[Iterable[int]] | None = None) -> Instance:
        """Sub-instance on ``vertices`` (relabelled), optionally with new lists."""
        if lists is None:
            lists = [self.lists[v] for v in vertices]
        return Instance(self.g.induced(vertices), self.h, tuple(frozenset(l) for l in lists))

    def list_total(self) -> int:
        return sum(len(l) for l in self.lists)

    def key(self) -> tuple:
        """Hashable identity of the (G, L) part; H is assumed shared."""
        return (self.g.n, self.g.arcs, self.lists)


def verify_homomorphism(inst: Instance, f: Sequence[int] | Mapping[int, int]) -> bool:
    """True iff ``f`` respects every list and maps every arc of G onto an arc of H."""
    try:
        image = [f[x] for x in range(inst.g.n)]
    except (KeyError, IndexError, TypeError):
        return False
    if isinstance(f, Sequence) and len(f) != inst.g.n:
        return False
    for x, a in enumerate(image):
        if not isinstance(a, int) or a not in inst.lists[x]:
            return False
    return all((image[u], image[v]) in inst.h.arcs for u, v in inst.g.arcs)


@dataclass(frozen=True)
class OrientedWalk:
    """Walk ``v0..vk`` with one direction flag per step (True = forward arc)."""

    vertices: tuple[int, ...]
    directions: tuple[bool, ...]

    def __post_init__(self):
        if len(self.vertices) == 0 and len(self.directions) == 0:
            return
        if len(self.directions) != len(self.vertices) - 1:
            raise ValueError("a walk needs exactly one direction per step")

    @classmethod
    def along(cls, host: Digraph, vertices: Sequence[int]) -> OrientedWalk:
        """Orient a vertex sequence using the arcs of ``host``; forward wins on 2-cycles."""
        dirs = []
        for u, v in zip(vertices, vertices[1:]):
            if host.has_arc(u, v):
                dirs.append(True)
            elif host.has_arc(v, u):
                dirs.append(False)
            else:
                raise ValueError(f"{u} and {v} are not adjacent")
        return cls(tuple(vertices), tuple(dirs))

    def is_walk_in(self, host: Digraph) -> bool:
        for (u, v), fwd in zip(zip(self.vertices, self.vertices[1:]), self.directions):
            if not (host.has_arc(u, v) if fwd else host.has_arc(v, u)):
                return False
        return True

    def __len__(self) -> int:
        return len(self.directions)


def congruent(w1: OrientedWalk, w2: OrientedWalk) -> bool:
    """Two walks are congruent when their forward/backward patterns coincide."""
    return w1.directions == w2.directions


def product_graph(inst: Instance) -> tuple[list[tuple[int, int]], set[tuple[int, int]]]:
    """The list product ``G x_L H``.

    Returns the vertex list (pairs ``(x, a)`` with ``a`` in ``L(x)``, sorted) and
    the arc set, given as index pairs into that list.
    """
    verts = sorted((x, a) for x in range(inst.g.n) for a in inst.lists[x])
    index = {v: i for i, v in enumerate(verts)}
    arcs = set()
    for x, y in inst.g.arcs:
        for a in inst.lists[x]:
            for b in inst.h.out_nbrs[a]:
                if b in inst.lists[y]:
                    arcs.add((index[(x, a)], index[(y, b)]))
    return verts, arcs
