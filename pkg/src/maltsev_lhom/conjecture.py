"""Experimental harness: distinguisher sets and a candidate Maltsev construction.

Nothing here is claimed to be correct in general. ``build_triple_maltsev``
either returns an assignment that passed the triple-consistency check or a
``CounterexampleReport`` that replays deterministically.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field

from .consistency import PairLists, preprocess
from .core import Instance

Key = tuple[int, int, int, int]


class NotApplicable(ValueError):
    """Some distinguisher set is empty before construction starts."""


def weak_rectangle(pl: PairLists, x: int, a: int, b: int) -> bool:
    """Some y, c with (a, c) and (b, c) both in L(x, y)."""
    for y in range(pl.n):
        if y != x and pl.partners(x, a, y) & pl.partners(x, b, y):
            return True
    return False


def strong_rectangle(pl: PairLists, x: int, y: int, a: int, b: int, c: int, d: int) -> bool:
    return all(pl.has(x, p, y, q) for p in (a, b) for q in (c, d))


def _triples(lst) -> list[tuple[int, int, int]]:
    return list(itertools.product(sorted(lst), repeat=3))


def compute_ds(pl: PairLists) -> dict[Key, frozenset[int]]:
    """Distinguisher sets for every vertex and every triple of its list."""
    lists = pl.lists()
    partners = {
        (x, a, y): pl.partners(x, a, y)
        for x in range(pl.n)
        for a in lists[x]
        for y in range(pl.n)
    }
    ds: dict[Key, frozenset[int]] = {}
    for x in range(pl.n):
        for a, b, c in _triples(lists[x]):
            if a == b:
                ds[(x, a, b, c)] = frozenset({c})
                continue
            if b == c:
                ds[(x, a, b, c)] = frozenset({a})
                continue
            keep = set()
            for d in lists[x]:
                ok = True
                for y in range(pl.n):
                    pa, pb, pc, pd = (partners[(x, v, y)] for v in (a, b, c, d))
                    # alpha common to a, b, c must reach d
                    if not (pa & pb & pc) <= pd:
                        ok = False
                    # alpha common to a, b and beta at c: beta must reach d
                    elif pa & pb and not pc <= pd:
                        ok = False
                    # alpha common to b, c and beta at a: beta must reach d
                    elif pb & pc and not pa <= pd:
                        ok = False
                    if not ok:
                        break
                if ok:
                    keep.add(d)
            ds[(x, a, b, c)] = frozenset(keep)
    return ds


def _compatible(pl: PairLists, x: int, t: tuple[int, int, int], y: int):
    a, b, c = t
    return itertools.product(
        sorted(pl.partners(x, a, y)), sorted(pl.partners(x, b, y)), sorted(pl.partners(x, c, y))
    )


class _Propagator:
    """Worklist pair consistency on distinguisher sets, with partner sets cached."""

    def __init__(self, pl: PairLists):
        self.pl = pl
        lists = pl.lists()
        self.part = {
            (x, a, y): pl.partners(x, a, y)
            for x in range(pl.n)
            for a in lists[x]
            for y in range(pl.n)
        }
        self.compat: dict[tuple, list] = {}

    def compatible(self, y: int, t, x: int) -> list:
        key = (y, t, x)
        if key not in self.compat:
            self.compat[key] = list(_compatible(self.pl, y, t, x))
        return self.compat[key]

    def run(self, ds: dict[Key, frozenset[int]], changed=None) -> dict[Key, frozenset[int]]:
        ds = dict(ds)
        queue = deque(sorted(ds) if changed is None else changed)
        queued = set(queue)
        while queue:
            key = queue.popleft()
            queued.discard(key)
            y, tb = key[0], key[1:]
            here = ds[key]
            # DS(y, tb) shrank (or is new): recheck every DS(x, ta) compatible with it
            for x in range(self.pl.n):
                if x == y:
                    continue
                for ta in self.compatible(y, tb, x):
                    other = (x, *ta)
                    kept = frozenset(d for d in ds[other] if self.part[(x, d, y)] & here)
                    if len(kept) != len(ds[other]):
                        ds[other] = kept
                        if other not in queued:
                            queue.append(other)
                            queued.add(other)
        return ds


def ds_pair_consistency(pl: PairLists, ds: dict[Key, frozenset[int]], changed=None) -> dict[Key, frozenset[int]]:
    """Delete d from DS(x,t) when some compatible DS(y,t') has no partner of d. Only deletes.

    ``changed`` limits the initial worklist to keys whose sets just shrank;
    the default rechecks everything.
    """
    return _Propagator(pl).run(ds, changed)


def verify_triple_maltsev(inst: Instance, pl: PairLists, h: dict[Key, int]) -> list[str]:
    """Problems with ``h`` as a triple-consistent Maltsev assignment; empty when it passes."""
    problems = []
    lists = pl.lists()
    for x in range(inst.g.n):
        for a, b, c in _triples(lists[x]):
            v = h.get((x, a, b, c))
            if v is None or v not in lists[x]:
                problems.append(f"h{(x, a, b, c)} missing or outside L({x})")
            elif b == c and v != a:
                problems.append(f"h{(x, a, b, c)} = {v}, expected {a}")
            elif a == b and v != c:
                problems.append(f"h{(x, a, b, c)} = {v}, expected {c}")
    if problems:
        return problems
    for x, y in sorted(inst.g.arcs):
        for t in _triples(lists[x]):
            for t2 in _compatible(pl, x, t, y):
                if (h[(x, *t)], h[(y, *t2)]) not in inst.h.arcs:
                    problems.append(f"arc {x}->{y}: h{(x, *t)} h{(y, *t2)} not an arc of H")
    return problems


@dataclass
class CounterexampleReport:
    """Everything needed to replay a failed construction."""

    instance: Instance
    reason: str
    trace: list = field(default_factory=list)
    general_step1: bool = False

    def to_json(self) -> str:
        from .io import instance_to_dict

        return json.dumps(
            {
                "instance": instance_to_dict(self.instance),
                "reason": self.reason,
                "trace": [list(map(list, step)) if isinstance(step, tuple) else step for step in self.trace],
                "general_step1": self.general_step1,
            },
            sort_keys=True,
            separators=(",", ":"),
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> CounterexampleReport:
        from .io import instance_from_dict

        data = json.loads(text)
        return cls(
            instance_from_dict(data["instance"]),
            data["reason"],
            data["trace"],
            data.get("general_step1", False),
        )

    def replay(self) -> CounterexampleReport | ConjectureResult:
        return build_triple_maltsev(self.instance, general_step1=self.general_step1)


@dataclass
class ConjectureResult:
    h: dict[Key, int]
    trace: list


def _trace_entry(step: str, key: Key, value) -> list:
    return [step, list(key), value]


def build_triple_maltsev(inst: Instance, *, general_step1: bool = False) -> ConjectureResult | CounterexampleReport:
    """Run the three-step construction.

    Raises NotApplicable when preprocessing fails or some distinguisher set is
    empty after pair consistency. ``general_step1`` fixes every singleton set in
    step 1 instead of only the (a, b, a) pattern.
    """
    pl = preprocess(inst)
    if pl is None:
        raise NotApplicable("preprocessing empties a list")
    prop = _Propagator(pl)
    ds = prop.run(compute_ds(pl))
    empty = [k for k, v in ds.items() if not v]
    if empty:
        raise NotApplicable(f"DS{empty[0]} is empty")
    trace: list = []
    h: dict[Key, int] = {}

    def fail(reason):
        return CounterexampleReport(inst, reason, trace, general_step1)

    # step 1: singletons fix their value
    for key in sorted(ds):
        _, a, _, c = key
        if len(ds[key]) == 1 and (general_step1 or a == c):
            h[key] = next(iter(ds[key]))
            trace.append(_trace_entry("fix", key, h[key]))

    # step 2: collapse (a, b, a) triples to a
    for key in sorted(ds):
        _, a, b, c = key
        if a == c and a != b and len(ds[key]) > 1:
            ds[key] = frozenset({a})
            trace.append(_trace_entry("collapse", key, a))
            ds = prop.run(ds, [key])
            if any(not v for v in ds.values()):
                return fail(f"a distinguisher set empties after collapsing {key}")

    # step 3: free choices, smallest id first
    for key in sorted(ds):
        if len(ds[key]) > 1:
            d = min(ds[key])
            ds[key] = frozenset({d})
            trace.append(_trace_entry("choose", key, d))
            ds = prop.run(ds, [key])
            if any(not v for v in ds.values()):
                return fail(f"a distinguisher set empties after choosing {d} at {key}")

    for key, v in ds.items():
        h[key] = next(iter(v))
    problems = verify_triple_maltsev(inst, pl, h)
    if problems:
        return fail("verification: " + problems[0])
    return ConjectureResult(h, trace)
