import itertools
import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from maltsev_lhom import io
from maltsev_lhom.consistency import preprocess
from maltsev_lhom.core import Digraph, Instance, verify_homomorphism
from maltsev_lhom.generators import random_planted_instance
from maltsev_lhom.oracle import brute_force_hom, brute_force_pairs
from maltsev_lhom.reductions import signature
from maltsev_lhom.solver import remove_minority

from corpus import matches_oracle_pairs

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def instances(draw, max_g=5, max_h=6):
    n = draw(st.integers(1, max_g))
    m = draw(st.integers(1, max_h))
    g_arcs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    h_arcs = draw(st.sets(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), max_size=m * m))
    lists = tuple(
        draw(st.frozensets(st.integers(0, m - 1), min_size=1)) for _ in range(n)
    )
    return Instance(Digraph(n, frozenset(g_arcs)), Digraph(m, frozenset(h_arcs)), lists)


@SETTINGS
@given(instances())
def test_fixpoint_equals_naive(inst):
    assert matches_oracle_pairs(preprocess(inst), brute_force_pairs(inst))


@SETTINGS
@given(instances())
def test_returned_maps_always_verify(inst):
    f = remove_minority(inst)
    if f is not None:
        assert verify_homomorphism(inst, f)


@SETTINGS
@given(instances(), st.data())
def test_fixpoint_is_monotone_under_list_removal(inst, data):
    pl = preprocess(inst)
    if pl is None:
        return
    x = data.draw(st.integers(0, inst.g.n - 1))
    a = data.draw(st.sampled_from(sorted(pl.unary(x))))
    pinned = pl.pin(x, a)
    if pinned is None:
        assert brute_force_hom(inst.pin(x, a)) is None
        return
    for y in range(inst.g.n):
        assert pinned.unary(y) <= pl.unary(y)
        for z in range(inst.g.n):
            assert pinned.pairs(y, z) <= pl.pairs(y, z)


@SETTINGS
@given(instances())
def test_homomorphisms_survive_preprocessing(inst):
    f = brute_force_hom(inst)
    pl = preprocess(inst)
    if f is None:
        return
    assert pl is not None
    for x, y in itertools.product(range(inst.g.n), repeat=2):
        assert (f[x], f[y]) in pl.pairs(x, y)


@SETTINGS
@given(instances())
def test_instance_json_round_trip(inst):
    text = io.dumps_instance(inst)
    back, _ = io.loads_instance(text)
    assert back == inst
    assert io.dumps_instance(back) == text


@given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), max_size=4))
def test_signature_transposes(t1, t2):
    assert signature(t2, t1) == {(j, i) for i, j in signature(t1, t2)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_planted_pair_lists_are_rectangular(seed):
    inst = random_planted_instance(random.Random(seed))
    pl = preprocess(inst)
    if pl is None:
        return
    for x, y in itertools.permutations(range(inst.g.n), 2):
        rel = pl.pairs(x, y)
        for (a, c), (b, d) in itertools.product(rel, repeat=2):
            if (b, c) in rel:
                assert (a, d) in rel
