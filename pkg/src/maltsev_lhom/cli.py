"""Command-line interface.

Exit codes: 0 HOM / OK / table found, 1 NONE / verification failed,
2 malformed input, 3 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from pathlib import Path

from . import io
from .core import verify_homomorphism
from .oracle import (
    BudgetExceeded,
    brute_force_hom,
    brute_force_list_maltsev,
    brute_force_list_majority,
    brute_force_pairs,
    verify_maltsev_table,
)

EXIT_OK, EXIT_NONE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

CAVEAT = "# NONE is exact only when the instance has a Maltsev list polymorphism"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise io.InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    return int(os.environ.get("MALTSEV_HOM_BUDGET", 10**7))


def cmd_solve(args) -> int:
    from .solver import SolverStats, remove_minority

    inst, names = io.loads_instance(_read(args.instance))
    stats = SolverStats()
    f = remove_minority(
        inst,
        debug=args.debug_oracle,
        push_both_witness_ends=args.push_both_witness_ends,
        descending=args.descending,
        stats=stats,
    )
    if args.debug_oracle:
        for v in stats.violations:
            print(f"# violation: {v}", file=sys.stderr)
    if f is not None:
        # never print HOM for a map that does not verify
        assert verify_homomorphism(inst, f)
    if args.format == "json":
        payload = {"result": "HOM" if f is not None else "NONE"}
        if f is not None:
            payload["map"] = list(f)
        sys.stdout.write(io.canonical(payload))
    elif f is not None:
        sys.stdout.write(io.format_map(f, names))
    else:
        sys.stdout.write("NONE\n")
        if args.assume_maltsev == "no":
            sys.stdout.write(CAVEAT + "\n")
    return EXIT_OK if f is not None else EXIT_NONE


def cmd_verify(args) -> int:
    if args.maltsev:
        hg = io.hypergraph_from_dict(io.parse_json(_read(args.instance)))
        table = io.parse_table(_read(args.answer), hg.domain)
        ok = table.is_total() and verify_maltsev_table(hg, table)
    else:
        inst, names = io.loads_instance(_read(args.instance))
        f = io.parse_map(_read(args.answer), inst.g.n, names, inst.lists)
        ok = verify_homomorphism(inst, f)
    print("OK" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NONE


def cmd_detect(args) -> int:
    from .reductions import detect_maltsev

    hg = io.hypergraph_from_dict(io.parse_json(_read(args.hypergraph)))
    table = detect_maltsev(hg)
    if table is None:
        print("NONE")
        return EXIT_NONE
    _emit(io.format_table(table), args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    from .reductions import h_labels, hyper_to_graph

    hi = io.hyper_instance_from_dict(io.parse_json(_read(args.hyper_instance)))
    inst = hyper_to_graph(hi)
    names = {
        "g": [f"e{k}" for k in range(len(hi.source))],
        "h": [f"e{k}:" + "".join(map(str, t)) for k, t in h_labels(hi)],
    }
    _emit(io.dumps_instance(inst, names), args.output)
    return EXIT_OK


def cmd_gen_linear(args) -> int:
    from . import generators as gen

    if args.worked_example:
        system = gen.worked_system()
        inst = gen.worked_example(args.pin)
    elif args.system:
        data = io.parse_json(_read(args.system))
        try:
            system = gen.LinearSystemZ2(
                tuple(data["variables"]),
                tuple((tuple(e["vars"]), int(e["parity"])) for e in data["equations"]),
                tuple(data.get("labels", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise io.InputError(f"linear system: {exc}") from None
        inst = gen.linear_instance(system)
    else:
        rng = random.Random(args.seed)
        system = gen.chain_linear_system(rng, args.equations, planted=not args.unplanted)
        inst = gen.linear_instance(system)
    names = {"g": list(system.labels), "h": gen.h_vertex_names(system)}
    _emit(io.dumps_instance(inst, names), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst, names = io.loads_instance(_read(args.instance))
    budget = _budget(args)
    if args.which == "hom":
        f = brute_force_hom(inst, budget=budget)
        sys.stdout.write(io.format_map(f, names) if f is not None else "NONE\n")
        return EXIT_OK if f is not None else EXIT_NONE
    if args.which == "pairs":
        res = brute_force_pairs(inst)
        if res is None:
            print("NONE")
            return EXIT_NONE
        lists, rel = res
        payload = {
            "lists": [sorted(l) for l in lists],
            "pairs": {f"{x},{y}": sorted(map(list, p)) for (x, y), p in sorted(rel.items()) if x < y},
        }
        sys.stdout.write(io.canonical(payload))
        return EXIT_OK
    search = brute_force_list_maltsev if args.which == "maltsev" else brute_force_list_majority
    poly = search(inst, budget=budget)
    if poly is None:
        print("NONE")
        return EXIT_NONE
    for (x, a, b, c), v in sorted(poly.items()):
        print(f"{x}: {a} {b} {c} -> {v}")
    return EXIT_OK


def cmd_check_conjecture(args) -> int:
    from .conjecture import CounterexampleReport, NotApplicable, build_triple_maltsev
    from .generators import random_instance

    counts = {"verified": 0, "counterexample": 0, "not_applicable": 0}
    for k in range(args.count):
        seed = args.seed + k
        inst = random_instance(seed, args.mode)
        try:
            res = build_triple_maltsev(inst, general_step1=args.general_step1)
        except NotApplicable:
            counts["not_applicable"] += 1
            continue
        if isinstance(res, CounterexampleReport):
            counts["counterexample"] += 1
            if args.report_dir:
                Path(args.report_dir).mkdir(parents=True, exist_ok=True)
                Path(args.report_dir, f"counterexample-{seed}.json").write_text(res.to_json())
        else:
            counts["verified"] += 1
    sys.stdout.write(io.canonical(counts) if args.format == "json" else
                     "".join(f"{k}: {v}\n" for k, v in counts.items()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None, help="oracle node budget (default MALTSEV_HOM_BUDGET or 10^7)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="maltsev-lhom", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="decide an instance file")
    s.add_argument("instance")
    s.add_argument("--debug-oracle", action="store_true", help="cross-check every removal with brute force")
    s.add_argument("--assume-maltsev", choices=("yes", "no"), default="yes")
    s.add_argument("--push-both-witness-ends", action="store_true")
    s.add_argument("--descending", action="store_true", help="try the larger of two values first")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="check a map (or a table with --maltsev)")
    s.add_argument("instance")
    s.add_argument("answer")
    s.add_argument("--maltsev", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("detect-maltsev", parents=[common], help="Maltsev polymorphism of a relational structure")
    s.add_argument("hypergraph")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("reduce-csp", parents=[common], help="hyper-instance file -> instance file")
    s.add_argument("hyper_instance")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("gen-linear", parents=[common], help="instance from a linear system over GF(2)")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--worked-example", action="store_true", help="the ten-equation worked example")
    src.add_argument("--system", help="JSON file {variables, equations:[{vars, parity}], labels?}")
    src.add_argument("--random", action="store_true", help="random connected 3-variable system")
    s.add_argument("--pin", choices=("00", "11"))
    s.add_argument("--equations", type=int, default=10)
    s.add_argument("--unplanted", action="store_true", help="random parities instead of a hidden solution")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen_linear)

    s = sub.add_parser("oracle", parents=[common], help="brute-force ground truth")
    s.add_argument("which", choices=("hom", "pairs", "maltsev", "majority"))
    s.add_argument("instance")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("check-conjecture", parents=[common], help="run the distinguisher construction")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--mode", choices=("uniform", "planted"), default="planted")
    s.add_argument("--general-step1", action="store_true")
    s.add_argument("--report-dir")
    s.set_defaults(func=cmd_check_conjecture)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except io.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
