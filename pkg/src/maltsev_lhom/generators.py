"""Instance families: linear systems over GF(2), the named small examples, random instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import Digraph, Instance
from .reductions import HyperInstance, hyper_to_graph


@dataclass(frozen=True)
class LinearSystemZ2:
    """Equations ``sum of variables = parity (mod 2)``.

    ``equations[k]`` is ``(variable names, parity)``; ``labels[k]`` names the
    equation (it becomes the name of a G-vertex).
    """

    variables: tuple[str, ...]
    equations: tuple[tuple[tuple[str, ...], int], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValueError("variable names must be distinct")
        for names, parity in self.equations:
            missing = [v for v in names if v not in known]
            if missing:
                raise ValueError(f"undeclared variables {missing}")
            if len(set(names)) != len(names):
                raise ValueError(f"equation {names} repeats a variable")
            if parity not in (0, 1):
                raise ValueError("parity must be 0 or 1")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{k}" for k in range(len(self.equations))))
        elif len(self.labels) != len(self.equations):
            raise ValueError("one label per equation")

    def solutions(self, k: int) -> list[tuple[int, ...]]:
        """0/1 tuples solving equation k, ascending as binary strings."""
        names, parity = self.equations[k]
        return [t for t in itertools.product((0, 1), repeat=len(names)) if sum(t) % 2 == parity]

    def satisfies(self, assignment: dict[str, int]) -> bool:
        return all(sum(assignment[v] for v in names) % 2 == p for names, p in self.equations)


def gf2_solve(system: LinearSystemZ2) -> dict[str, int] | None:
    """Gaussian elimination over GF(2) with rows as int bitmasks; a solution or None."""
    index = {v: i for i, v in enumerate(system.variables)}
    nvar = len(index)
    rows = []
    for names, parity in system.equations:
        mask = 0
        for v in names:
            mask |= 1 << index[v]
        rows.append(mask | parity << nvar)
    pivots = []
    r = 0
    for col in range(nvar):
        pick = next((i for i in range(r, len(rows)) if rows[i] >> col & 1), None)
        if pick is None:
            continue
        rows[r], rows[pick] = rows[pick], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> col & 1:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
    if any(row == 1 << nvar for row in rows[r:]):
        return None
    # free variables are 0; each pivot row then reads off its variable
    values = [0] * nvar
    for i, col in enumerate(pivots):
        values[col] = rows[i] >> nvar & 1
    return {v: values[i] for v, i in index.items()}


def linear_to_hyper(system: LinearSystemZ2) -> HyperInstance:
    index = {v: i for i, v in enumerate(system.variables)}
    source = tuple(tuple(index[v] for v in names) for names, _ in system.equations)
    lists = tuple(tuple(system.solutions(k)) for k in range(len(system.equations)))
    return HyperInstance(len(system.variables), source, lists)


def linear_instance(system: LinearSystemZ2) -> Instance:
    return hyper_to_graph(linear_to_hyper(system))


def h_vertex_names(system: LinearSystemZ2) -> list[str]:
    """Bit-string name of every H-vertex, in id order."""
    return [
        "".join(map(str, t))
        for k in range(len(system.equations))
        for t in system.solutions(k)
    ]


# Variables shared by two equations are named after both; Z occurs once only,
# which forces Z = 0 (add up all equations) and therefore Y = 0.
_WORKED_EQUATIONS = [
    ("alpha", ("Y", "Z")),
    ("beta", ("Y", "X_beta_gamma", "X_beta_delta")),
    ("gamma", ("X_gamma_lambda", "X_gamma_mu", "X_gamma_delta", "X_beta_gamma")),
    ("delta", ("X_delta_mu", "X_beta_delta", "X_gamma_delta", "X_delta_lambda")),
    ("theta", ("X_lambda_theta", "X_theta_pi", "X_theta_tau", "X_theta_mu")),
    ("lambda", ("X_gamma_lambda", "X_delta_lambda", "X_lambda_theta", "X_lambda_pi")),
    ("mu", ("X_gamma_mu", "X_delta_mu", "X_theta_mu", "X_pi_mu")),
    ("pi", ("X_lambda_pi", "X_theta_pi", "X_pi_omega", "X_pi_mu")),
    ("tau", ("X_theta_tau", "X_tau_omega")),
    ("omega", ("X_pi_omega", "X_tau_omega")),
]


def worked_system() -> LinearSystemZ2:
    """The ten-equation worked example: solvable, but not with Y = Z = 1."""
    variables: list[str] = []
    for _, names in _WORKED_EQUATIONS:
        for v in names:
            if v not in variables:
                variables.append(v)
    return LinearSystemZ2(
        tuple(variables),
        tuple((names, 0) for _, names in _WORKED_EQUATIONS),
        tuple(label for label, _ in _WORKED_EQUATIONS),
    )


WORKED_LABELS = tuple(label for label, _ in _WORKED_EQUATIONS)


def worked_example(pin: str | None = None) -> Instance:
    """Reduced instance of the worked example; H ids 0..57 in equation order.

    ``pin`` ("00" or "11") narrows the list of the first equation.
    """
    system = worked_system()
    inst = linear_instance(system)
    if pin is None:
        return inst
    names = h_vertex_names(system)
    if pin not in ("00", "11"):
        raise ValueError("pin must be '00' or '11'")
    lists = list(inst.lists)
    lists[0] = frozenset(v for v in lists[0] if names[v] == pin)
    return inst.with_lists(lists)


# -- the two four-vertex examples -----------------------------------------

EXAMPLE_G_NAMES = ("x", "y", "z", "w")
EXAMPLE1_H_NAMES = ("1", "2", "a", "b", "c", "d", "e", "f", "i", "j")
EXAMPLE2_H_NAMES = EXAMPLE1_H_NAMES + ("g",)
_EXAMPLE_G_ARCS = [("x", "y"), ("y", "w"), ("y", "z")]


def _named_instance(h_names, h_arcs, lists) -> Instance:
    gi = {v: i for i, v in enumerate(EXAMPLE_G_NAMES)}
    hi = {v: i for i, v in enumerate(h_names)}
    g = Digraph(4, frozenset((gi[u], gi[v]) for u, v in _EXAMPLE_G_ARCS))
    h = Digraph(len(h_names), frozenset((hi[a], hi[b]) for a, b in h_arcs))
    return Instance(g, h, tuple(frozenset(hi[a] for a in lists[x]) for x in EXAMPLE_G_NAMES))


def example1_instance() -> Instance:
    """Has a Maltsev list polymorphism but no majority one (arcs hand-reconstructed)."""
    arcs = [
        ("1", "a"), ("1", "d"), ("2", "b"), ("2", "c"),
        ("a", "e"), ("b", "e"), ("c", "f"), ("d", "f"),
        ("a", "i"), ("b", "j"), ("c", "i"), ("d", "j"),
    ]
    lists = {"x": "12", "y": "abcd", "z": "ij", "w": "ef"}
    return _named_instance(EXAMPLE1_H_NAMES, arcs, lists)


def example2_instance() -> Instance:
    """Rectangle property holds yet no Maltsev list polymorphism (arcs reconstructed)."""
    arcs = [
        ("1", "a"), ("1", "d"), ("2", "b"), ("2", "c"), ("2", "g"),
        ("a", "j"), ("b", "j"), ("c", "i"), ("d", "i"), ("g", "j"),
        ("a", "e"), ("b", "e"), ("c", "f"), ("d", "e"), ("g", "f"),
    ]
    lists = {"x": "12", "y": "abcdg", "z": "ij", "w": "ef"}
    return _named_instance(EXAMPLE2_H_NAMES, arcs, lists)


# -- random families ------------------------------------------------------


def random_linear_system(
    rng: random.Random,
    n_equations: int,
    *,
    arities=(2, 3),
    n_variables: int | None = None,
    planted: bool = True,
) -> LinearSystemZ2:
    """Random equations over a variable pool; ``planted`` picks parities from a hidden solution."""
    if n_variables is None:
        n_variables = max(2, (n_equations * 3) // 2)
    variables = tuple(f"v{i}" for i in range(n_variables))
    hidden = {v: rng.randrange(2) for v in variables}
    equations = []
    for _ in range(n_equations):
        k = min(rng.choice(arities), n_variables)
        names = tuple(rng.sample(variables, k))
        parity = sum(hidden[v] for v in names) % 2 if planted else rng.randrange(2)
        equations.append((names, parity))
    return LinearSystemZ2(variables, tuple(equations))


def chain_linear_system(rng: random.Random, n_equations: int, *, planted: bool = True) -> LinearSystemZ2:
    """Connected system of 3-variable equations along a path with random chords.

    Equation k shares one variable with equation k-1 and one with an earlier
    random equation, so G is connected and every list has four tuples.
    """
    variables: list[str] = []
    equations: list[tuple[str, ...]] = []

    def fresh() -> str:
        variables.append(f"v{len(variables)}")
        return variables[-1]

    for k in range(n_equations):
        names = [fresh()]
        if k == 0:
            names += [fresh(), fresh()]
        else:
            names.append(equations[k - 1][0])
            other = equations[rng.randrange(k)]
            pick = rng.choice(other)
            names.append(pick if pick not in names else fresh())
        equations.append(tuple(names))
    hidden = {v: rng.randrange(2) for v in variables}
    return LinearSystemZ2(
        tuple(variables),
        tuple(
            (names, sum(hidden[v] for v in names) % 2 if planted else rng.randrange(2))
            for names in equations
        ),
    )


def random_digraph_instance(
    rng: random.Random,
    *,
    max_g: int = 6,
    max_h: int = 8,
    loops: bool = True,
) -> Instance:
    """Uniform family: random G, random H of random density, random non-empty lists."""
    n = rng.randint(1, max_g)
    m = rng.randint(2, max_h)
    pairs = [(u, v) for u in range(n) for v in range(n) if loops or u != v]
    g_arcs = set(rng.sample(pairs, rng.randint(0, min(len(pairs), 2 * n))))
    density = rng.uniform(0.1, 0.6)
    h_arcs = {(a, b) for a in range(m) for b in range(m) if (loops or a != b) and rng.random() < density}
    lists = [frozenset(rng.sample(range(m), rng.randint(1, m))) for _ in range(n)]
    return Instance(Digraph(n, frozenset(g_arcs)), Digraph(m, frozenset(h_arcs)), tuple(lists))


def random_planted_instance(rng: random.Random, *, max_h: int = 8) -> Instance:
    """Reduced random linear system whose H stays within ``max_h`` vertices.

    The coordinatewise a+b+c operation makes every such instance Maltsev.
    """
    budget = max_h
    equations = []
    n_var = rng.randint(2, 4)
    variables = tuple(f"v{i}" for i in range(n_var))
    while True:
        k = rng.randint(1, min(3, n_var))
        size = 2 ** (k - 1)
        if size > budget:
            break
        budget -= size
        equations.append((tuple(rng.sample(variables, k)), rng.randrange(2)))
        if budget == 0 or rng.random() < 0.15:
            break
    return linear_instance(LinearSystemZ2(variables, tuple(equations)))


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def _affine_subspace(rng: random.Random, k: int, n_rows: int, total_bits: int) -> tuple[list[int], list[int]]:
    """Random equations ``<row, v> = c`` over GF(2) with a guaranteed solution."""
    point = rng.randrange(2**total_bits)
    rows = [rng.randrange(1, 2**total_bits) for _ in range(n_rows)]
    return rows, [_parity(r & point) for r in rows]


def random_affine_instance(rng: random.Random, *, max_g: int = 6, max_h: int = 8) -> Instance:
    """H on GF(2)^k whose arc relation is an affine subspace of pairs; lists are affine subspaces.

    x + y + z preserves every affine subspace, so each instance has a Maltsev
    list polymorphism. G is weakly connected with extra chords, so pair
    consistency alone often leaves several values per vertex.
    """
    k = rng.choice([d for d in (1, 2, 3) if 2**d <= max_h])
    m = 2**k
    rows, cs = _affine_subspace(rng, k, rng.randint(1, k), 2 * k)
    h_arcs = {
        (a, b)
        for a in range(m)
        for b in range(m)
        if all(_parity(r & (a | b << k)) == c for r, c in zip(rows, cs))
    }
    n = rng.randint(2, max_g)
    arcs = set()
    for v in range(1, n):
        u = rng.randrange(v)
        arcs.add((u, v) if rng.random() < 0.5 else (v, u))
    for _ in range(rng.randint(0, n)):
        u, v = rng.sample(range(n), 2)
        arcs.add((u, v))
    lists = []
    for _ in range(n):
        if rng.random() < 0.3:
            lrows, lcs = _affine_subspace(rng, k, 1, k)
            lists.append(frozenset(v for v in range(m) if all(_parity(r & v) == c for r, c in zip(lrows, lcs))))
        else:
            lists.append(frozenset(range(m)))
    return Instance(Digraph(n, frozenset(arcs)), Digraph(m, frozenset(h_arcs)), tuple(lists))


def random_instance(seed: int, mode: str = "uniform", **params) -> Instance:
    """Reproducible instance; ``mode`` is "uniform", "planted" or "affine"."""
    rng = random.Random(seed)
    if mode == "uniform":
        return random_digraph_instance(rng, **params)
    if mode == "planted":
        return random_planted_instance(rng, **params)
    if mode == "affine":
        return random_affine_instance(rng, **params)
    raise ValueError(f"unknown mode {mode!r}")


def random_hyper_instance(rng: random.Random, *, elements: int = 4, edges: int = 3, domain: int = 2) -> HyperInstance:
    """Tiny hypergraph list instance over a small domain."""
    source, lists = [], []
    for _ in range(edges):
        k = rng.randint(1, min(3, elements))
        source.append(tuple(rng.sample(range(elements), k)))
        tuples = list(itertools.product(range(domain), repeat=k))
        lists.append(tuple(rng.sample(tuples, rng.randint(1, len(tuples)))))
    return HyperInstance(elements, tuple(source), tuple(lists))
