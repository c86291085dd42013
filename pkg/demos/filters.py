"""Why the rewriting carries filters.

The canonical structure is small because it reuses one element per
concept.  That reuse creates joins no real model is forced to have; the
filters remove them.  Each case prints the raw core answers next to the
filtered ones and the oracle.

    python3 demos/filters.py
"""

from pathlib import Path

from roughel import answer, certain_answers_oracle, parse_kb, parse_query, prepare, rewrite
from roughel.evaluator import evaluate
from roughel.rewriter import FOQuery
from roughel.textio import serialize_foquery

DATA = Path(__file__).parent / "data"

CASES = [
    ("k3.rkb", "fork.rcq", "r- and s-successors share x[B]"),
    ("k3.rkb", "fork_upper.rcq", "same, with an upper approximation on y"),
    ("hierarchy.rkb", "both.rcq", "only a common subrole forces one successor"),
    ("k2.rkb", "someA.rcq", "x[C] is in A but nothing is forced to exist"),
    ("hasA.rkb", "phi4.rcq", "a hasA edge inside one granule"),
    ("hasA.rkb", "phi5.rcq", "two individuals with indiscernible parts"),
]

for kbf, qf, why in CASES:
    kb = parse_kb((DATA / kbf).read_text())
    q = parse_query((DATA / qf).read_text())
    fo = rewrite(q, kb.ris)
    _, s = prepare(kb, q)
    raw = evaluate(s, FOQuery(fo.answer_vars, fo.core, (), fo.quantified_vars))
    print(f"== {kbf} / {qf}: {why}")
    print(serialize_foquery(fo), end="")
    print("  core only :", raw)
    print("  filtered  :", answer(kb, q))
    print("  oracle    :", certain_answers_oracle(kb, q))
