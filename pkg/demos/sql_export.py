"""Export a structure and a rewritten query to SQL and run it in SQLite.

    python3 demos/sql_export.py [outdir]
"""

import sqlite3
import sys
import tempfile
from pathlib import Path

from roughel import parse_kb, parse_query, prepare, rewrite
from roughel.evaluator import emit_relational, evaluate, relational_facts

DATA = Path(__file__).parent / "data"

kb = parse_kb((DATA / "hasA.rkb").read_text())
q = parse_query((DATA / "phi5.rcq").read_text())
_, s = prepare(kb, q)
fo = rewrite(q, kb.ris)
schema, sql = emit_relational(s, fo)
print(sql)

db = sqlite3.connect(":memory:")
db.executescript(schema)
for table, (cols, rows) in relational_facts(s).items():
    marks = ", ".join("?" for _ in cols)
    db.executemany(f'INSERT INTO "{table}" VALUES ({marks})', rows)
rows = sorted(db.execute(sql).fetchall())
print("sqlite   :", rows)
print("evaluate :", evaluate(s, fo))

outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
from roughel.cli import main
main(["emit-sql", str(DATA / "hasA.rkb"), str(DATA / "phi5.rcq"), "--outdir", str(outdir)])
print("files in", outdir, ":", " ".join(sorted(p.name for p in outdir.iterdir())))
