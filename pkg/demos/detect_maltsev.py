"""Decide Maltsev polymorphism existence for two Boolean relations.

Run: python3 demos/detect_maltsev.py
"""

from maltsev_lhom.oracle import brute_force_hypergraph_maltsev, verify_maltsev_table
from maltsev_lhom.reductions import Block, Hypergraph, detect_maltsev, detection_instance

relations = {
    "x+y+z = 0": Hypergraph(2, (Block(3, ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))),)),
    "x <= y": Hypergraph(2, (Block(2, ((0, 0), (0, 1), (1, 1))),)),
    "x != y": Hypergraph(2, (Block(2, ((0, 1), (1, 0))),)),
}

for label, hg in relations.items():
    inst = detection_instance(hg)
    table = detect_maltsev(hg)
    truth = brute_force_hypergraph_maltsev(hg)
    print(f"{label}: detection instance |G|={inst.g.n} |H|={inst.h.n}")
    if table is None:
        print("    no Maltsev polymorphism", "(oracle agrees)" if truth is None else "(ORACLE DISAGREES)")
        continue
    assert verify_maltsev_table(hg, table)
    print("    Maltsev table found and verified", "(oracle agrees)" if truth is not None else "(ORACLE DISAGREES)")
