"""JSON file formats and the plain-text map and table formats.

Canonical JSON is ``json.dumps(sort_keys=True, separators=(",", ":"))`` plus a
trailing newline, so files are byte-stable under a load/dump round trip.
"""

from __future__ import annotations

import json
from typing import Any

from .core import Digraph, Instance
from .reductions import Block, HyperInstance, Hypergraph, TernaryTable


class InputError(ValueError):
    """Malformed input; ``line``/``column`` are set for JSON syntax errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line} column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


def canonical(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, exc.lineno, exc.colno) from None


def _need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"missing key {key!r} in {where}")
    return data[key]


def _digraph(data, where: str) -> Digraph:
    n = _need(data, "n", where)
    arcs = _need(data, "arcs", where)
    if not isinstance(n, int) or n < 0:
        raise InputError(f"{where}.n must be a non-negative integer")
    try:
        return Digraph(n, frozenset((int(u), int(v)) for u, v in arcs))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}.arcs: {exc}") from None


# -- instances --------------------------------------------------------------


def instance_to_dict(inst: Instance, names: dict | None = None) -> dict:
    out = {
        "g": {"n": inst.g.n, "arcs": sorted(map(list, inst.g.arcs))},
        "h": {"n": inst.h.n, "arcs": sorted(map(list, inst.h.arcs))},
        "lists": [sorted(l) for l in inst.lists],
    }
    if names:
        out["names"] = {k: list(v) for k, v in names.items()}
    return out


def instance_from_dict(data) -> Instance:
    g = _digraph(_need(data, "g", "instance"), "g")
    h = _digraph(_need(data, "h", "instance"), "h")
    lists = _need(data, "lists", "instance")
    try:
        return Instance(g, h, tuple(frozenset(int(a) for a in l) for l in lists))
    except (TypeError, ValueError) as exc:
        raise InputError(f"lists: {exc}") from None


def names_from_dict(data) -> dict[str, list[str]]:
    names = data.get("names") or {}
    return {k: [str(v) for v in names[k]] for k in ("g", "h") if k in names}


def dumps_instance(inst: Instance, names: dict | None = None) -> str:
    return canonical(instance_to_dict(inst, names))


def loads_instance(text: str) -> tuple[Instance, dict[str, list[str]]]:
    data = parse_json(text)
    return instance_from_dict(data), names_from_dict(data)


# -- hypergraphs -----------------------------------------------------------


def hypergraph_to_dict(hg: Hypergraph) -> dict:
    return {
        "domain": hg.domain,
        "blocks": [{"arity": b.arity, "tuples": [list(t) for t in b.tuples]} for b in hg.blocks],
    }


def hypergraph_from_dict(data) -> Hypergraph:
    domain = _need(data, "domain", "hypergraph")
    blocks = []
    for i, b in enumerate(_need(data, "blocks", "hypergraph")):
        arity = _need(b, "arity", f"blocks[{i}]")
        tuples = _need(b, "tuples", f"blocks[{i}]")
        try:
            blocks.append(Block(int(arity), tuple(tuple(int(v) for v in t) for t in tuples)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"blocks[{i}]: {exc}") from None
    try:
        return Hypergraph(int(domain), tuple(blocks))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def hyper_instance_to_dict(hi: HyperInstance, domain: int | None = None) -> dict:
    if domain is None:
        domain = 1 + max((v for l in hi.lists for t in l for v in t), default=-1)
    return {
        "domain": domain,
        "blocks": [],
        "source": {"domain": hi.elements, "edges": [list(e) for e in hi.source]},
        "lists": [[list(t) for t in l] for l in hi.lists],
    }


def hyper_instance_from_dict(data) -> HyperInstance:
    source = _need(data, "source", "hyper-instance")
    elements = _need(source, "domain", "source")
    edges = _need(source, "edges", "source")
    lists = _need(data, "lists", "hyper-instance")
    try:
        return HyperInstance(
            int(elements),
            tuple(tuple(int(v) for v in e) for e in edges),
            tuple(tuple(tuple(int(v) for v in t) for t in l) for l in lists),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


# -- plain-text outputs --------------------------------------------------------


def format_map(f, names: dict | None = None) -> str:
    gnames = (names or {}).get("g")
    hnames = (names or {}).get("h")
    lines = ["HOM"]
    for x, a in enumerate(f):
        lines.append(f"{gnames[x] if gnames else x} -> {hnames[a] if hnames else a}")
    return "\n".join(lines) + "\n"


def parse_map(text: str, n: int, names: dict | None = None, lists=None) -> list[int]:
    """Inverse of format_map; vertices may appear in any order.

    H names need not be unique (a label can repeat across lists); with
    ``lists`` given, a repeated name resolves to the id inside L(x).
    """
    gidx = {s: i for i, s in enumerate((names or {}).get("g", []))}
    hidx: dict[str, list[int]] = {}
    for i, s in enumerate((names or {}).get("h", [])):
        hidx.setdefault(s, []).append(i)
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "HOM":
        raise InputError("a map file starts with a HOM line", 1, 1)
    f = [-1] * n
    for lineno, ln in enumerate(lines[1:], start=2):
        left, sep, right = ln.partition("->")
        if not sep:
            raise InputError("expected 'x -> a'", lineno, 1)
        left, right = left.strip(), right.strip()
        try:
            x = gidx[left] if left in gidx else int(left)
            if right in hidx:
                cands = hidx[right]
                if lists is not None and 0 <= x < n:
                    cands = [a for a in cands if a in lists[x]] or cands
                a = cands[0]
            else:
                a = int(right)
        except ValueError:
            raise InputError(f"unknown vertex in {ln!r}", lineno, 1) from None
        if not 0 <= x < n:
            raise InputError(f"vertex {x} out of range", lineno, 1)
        f[x] = a
    return f


def format_table(table: TernaryTable) -> str:
    return "".join(f"{a} {b} {c} -> {d}\n" for a, b, c, d in table.rows())


def parse_table(text: str, domain: int) -> TernaryTable:
    values = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        if not ln.strip():
            continue
        left, sep, right = ln.partition("->")
        try:
            a, b, c = (int(v) for v in left.split())
            d = int(right)
        except ValueError:
            raise InputError(f"expected 'a b c -> d', got {ln!r}", lineno, 1) from None
        if not sep:
            raise InputError("missing '->'", lineno, 1)
        values[(a, b, c)] = d
    try:
        return TernaryTable.from_dict(domain, values)
    except (ValueError, IndexError) as exc:
        raise InputError(str(exc)) from None
