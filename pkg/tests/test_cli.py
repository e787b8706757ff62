import json
import random

import pytest

from maltsev_lhom import io
from maltsev_lhom.cli import main
from maltsev_lhom.core import Digraph, Instance
from maltsev_lhom.generators import worked_example, random_hyper_instance
from maltsev_lhom.oracle import brute_force_hyper_hom

AFFINE = {"domain": 2, "blocks": [{"arity": 3, "tuples": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]}]}
IMPLICATION = {"domain": 2, "blocks": [{"arity": 2, "tuples": [[0, 0], [0, 1], [1, 1]]}]}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(path, data):
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


@pytest.fixture
def singleton(tmp_path):
    inst = Instance(Digraph(2, frozenset({(0, 1)})), Digraph(2, frozenset({(0, 1)})), (frozenset({0}), frozenset({1})))
    return write(tmp_path / "one.json", io.dumps_instance(inst))


def test_linear_example_pinned_odd_is_none(tmp_path, capsys):
    f = tmp_path / "odd.json"
    assert run(capsys, "gen-linear", "--worked-example", "--pin", "11", "-o", f)[0] == 0
    code, out, _ = run(capsys, "solve", f)
    assert code == 1 and out.strip() == "NONE"


def test_singleton_instance_is_hom(singleton, capsys):
    code, out, _ = run(capsys, "solve", singleton)
    assert code == 0
    assert out == "HOM\n0 -> 0\n1 -> 1\n"


def test_solve_output_verifies(tmp_path, capsys):
    f = tmp_path / "even.json"
    run(capsys, "gen-linear", "--worked-example", "--pin", "00", "-o", f)
    code, out, _ = run(capsys, "solve", f)
    assert code == 0
    answer = write(tmp_path / "map.txt", out)
    assert run(capsys, "verify", f, answer)[:2] == (0, "OK\n")


def test_verify_rejects_a_wrong_map(singleton, tmp_path, capsys):
    answer = write(tmp_path / "map.txt", "HOM\n0 -> 1\n1 -> 0\n")
    assert run(capsys, "verify", singleton, answer)[:2] == (1, "FAIL\n")


def test_caveat_only_when_asked(tmp_path, capsys):
    f = tmp_path / "odd.json"
    run(capsys, "gen-linear", "--worked-example", "--pin", "11", "-o", f)
    _, plain, _ = run(capsys, "solve", f)
    _, noted, _ = run(capsys, "solve", f, "--assume-maltsev", "no")
    assert plain == "NONE\n"
    assert noted.startswith("NONE\n#")


def test_debug_oracle_flag_runs(tmp_path, capsys):
    f = tmp_path / "even.json"
    run(capsys, "gen-linear", "--worked-example", "--pin", "00", "-o", f)
    code, _, err = run(capsys, "solve", f, "--debug-oracle")
    assert code == 0 and "violation" not in err


def test_detect_affine_and_reverify(tmp_path, capsys):
    hg = write(tmp_path / "affine.json", AFFINE)
    table = tmp_path / "table.txt"
    assert run(capsys, "detect-maltsev", hg, "-o", table)[0] == 0
    assert "0 1 1 -> 0" in table.read_text()
    assert run(capsys, "verify", "--maltsev", hg, table)[:2] == (0, "OK\n")


def test_detect_implication_is_none(tmp_path, capsys):
    hg = write(tmp_path / "imp.json", IMPLICATION)
    assert run(capsys, "detect-maltsev", hg)[:2] == (1, "NONE\n")


def test_gen_linear_reproduces_the_example(tmp_path, capsys):
    f = tmp_path / "worked.json"
    run(capsys, "gen-linear", "--worked-example", "-o", f)
    inst, names = io.loads_instance(f.read_text())
    assert inst == worked_example()
    assert names["g"][0] == "alpha" and names["h"][:2] == ["00", "11"]


def test_gen_linear_from_system_file(tmp_path, capsys):
    system = write(tmp_path / "sys.json", {
        "variables": ["a", "b", "c"],
        "equations": [{"vars": ["a", "b"], "parity": 1}, {"vars": ["b", "c"], "parity": 1}, {"vars": ["a", "c"], "parity": 1}],
    })
    out = tmp_path / "odd.json"
    assert run(capsys, "gen-linear", "--system", system, "-o", out)[0] == 0
    assert run(capsys, "solve", out)[0] == 1


def test_reduce_then_solve_matches_hyper_oracle(tmp_path, capsys):
    for seed in range(25):
        hi = random_hyper_instance(random.Random(seed))
        src = write(tmp_path / f"hi{seed}.json", io.canonical(io.hyper_instance_to_dict(hi)))
        reduced = tmp_path / f"g{seed}.json"
        assert run(capsys, "reduce-csp", src, "-o", reduced)[0] == 0
        code, _, _ = run(capsys, "oracle", "hom", reduced)
        assert (code == 0) == (brute_force_hyper_hom(hi) is not None), seed


def test_oracle_budget_exceeded_exits_3(tmp_path, capsys):
    cyc = lambda n: Digraph(n, frozenset((i, (i + 1) % n) for i in range(n)))
    f = write(tmp_path / "cyc.json", io.dumps_instance(Instance.full_lists(cyc(9), cyc(2))))
    code, _, err = run(capsys, "oracle", "hom", f, "--budget", "10")
    assert code == 3 and "budget" in err


def test_oracle_budget_from_environment(tmp_path, capsys, monkeypatch):
    cyc = lambda n: Digraph(n, frozenset((i, (i + 1) % n) for i in range(n)))
    f = write(tmp_path / "cyc.json", io.dumps_instance(Instance.full_lists(cyc(9), cyc(2))))
    monkeypatch.setenv("MALTSEV_HOM_BUDGET", "10")
    assert run(capsys, "oracle", "hom", f)[0] == 3


@pytest.mark.parametrize("which", ["hom", "pairs", "maltsev", "majority"])
def test_oracle_subcommands_run(singleton, capsys, which):
    code, out, _ = run(capsys, "oracle", which, singleton)
    assert code == 0 and out


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", '{"g": {"n": 1,\n  oops}')
    code, _, err = run(capsys, "solve", bad)
    assert code == 2 and "line 2 column" in err


def test_missing_key_is_an_input_error(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", {"g": {"n": 1, "arcs": []}})
    assert run(capsys, "solve", bad)[0] == 2


def test_missing_file_is_an_input_error(tmp_path, capsys):
    assert run(capsys, "solve", tmp_path / "nope.json")[0] == 2


def test_outputs_are_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "gen-linear", "--random", "--equations", "8", "--seed", "3", "-o", a)
    run(capsys, "gen-linear", "--random", "--equations", "8", "--seed", "3", "-o", b)
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "solve", a) == run(capsys, "solve", b)


def test_instance_files_round_trip_byte_stable():
    text = io.dumps_instance(worked_example(), {"g": ["p"] * 10})
    inst, names = io.loads_instance(text)
    assert io.dumps_instance(inst, names) == text


def test_check_conjecture_json_counts(tmp_path, capsys):
    code, out, _ = run(capsys, "check-conjecture", "--count", "5", "--format", "json", "--report-dir", tmp_path)
    counts = json.loads(out)
    assert code == 0 and sum(counts.values()) == 5
