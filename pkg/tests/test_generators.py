import itertools
import random

from maltsev_lhom.generators import (
    LinearSystemZ2,
    gf2_solve,
    linear_instance,
    worked_example,
    worked_system,
    random_instance,
    random_linear_system,
)
from maltsev_lhom.oracle import BudgetExceeded, brute_force_list_maltsev


def test_two_variable_even_equation():
    s = LinearSystemZ2(("Y", "Z"), ((("Y", "Z"), 0),))
    assert s.solutions(0) == [(0, 0), (1, 1)]


def test_four_variable_even_equation_has_eight_solutions():
    s = LinearSystemZ2(tuple("abcd"), ((tuple("abcd"), 0),))
    assert len(s.solutions(0)) == 8


def test_empty_odd_equation_has_no_solution():
    s = LinearSystemZ2(("a",), (((), 1),))
    assert s.solutions(0) == []


def test_linear_example_ids_and_sizes():
    inst = worked_example()
    assert inst.g.n == 10 and inst.h.n == 58
    assert sorted(inst.lists[0]) == [0, 1]
    assert sorted(inst.lists[1]) == [2, 3, 4, 5]
    assert sorted(inst.lists[2]) == list(range(6, 14))


def test_linear_example_is_the_reduced_system():
    # same construction path, so equality is exact rather than up to relabeling
    assert worked_example() == linear_instance(worked_system())


def test_linear_example_solution_forces_even_pin():
    sol = gf2_solve(worked_system())
    assert sol is not None and sol["Y"] == 0 and sol["Z"] == 0


def test_same_seed_same_instance():
    for mode in ("uniform", "planted"):
        assert random_instance(7, mode) == random_instance(7, mode)
    assert random_instance(7) != random_instance(8)


def test_planted_family_is_maltsev():
    for seed in range(40):
        assert brute_force_list_maltsev(random_instance(seed, "planted")) is not None, seed


def test_uniform_family_contains_non_maltsev_instances():
    misses = 0
    for seed in range(60):
        try:
            misses += brute_force_list_maltsev(random_instance(seed), budget=200_000) is None
        except BudgetExceeded:
            pass
    assert misses > 0


def test_gf2_solver_agrees_with_enumeration():
    for seed in range(60):
        rng = random.Random(seed)
        s = random_linear_system(rng, rng.randint(1, 5), n_variables=rng.randint(2, 5), planted=seed % 2 == 0)
        sol = gf2_solve(s)
        exists = any(
            s.satisfies(dict(zip(s.variables, bits)))
            for bits in itertools.product(range(2), repeat=len(s.variables))
        )
        assert (sol is not None) == exists
        if sol is not None:
            assert s.satisfies(sol)
