"""Walk through the hospital-style running example: normalize, saturate,
materialize, then ask who is certainly in the lower approximation of B.

    python3 demos/running_example.py
"""

from pathlib import Path

from roughel import answer, materialize, normalize_kb, parse_kb, parse_query, saturate
from roughel.canonical import granule_of
from roughel.core import Named
from roughel.textio import serialize_kb, serialize_structure

DATA = Path(__file__).parent / "data"

kb = parse_kb((DATA / "kex.rkb").read_text())
print("-- input")
print(serialize_kb(kb))

ntbox, nkb = normalize_kb(kb)
print("-- normalized (fresh names start with _N)")
print(serialize_kb(nkb))

sat = saturate(kb)
print("-- consistent:", not sat.inconsistent)

s = materialize(kb, sat)
print(f"-- reachable canonical structure, {len(s.domain)} elements")
print(serialize_structure(s))

for seed in sorted((e for e in s.domain if isinstance(e, Named)), key=str):
    print(f"granule of {seed}:", " ".join(sorted(map(str, granule_of(s, seed)))))

q = parse_query((DATA / "lowerB.rcq").read_text())
print("-- certain answers of Lower(B)(x):", answer(kb, q))
