"""Command-line front end.

Exit status: 0 on success, 1 on logic errors (inconsistent KB, role
synonyms, unknown individuals, answer mismatch), 2 on I/O and parse
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .canonical import materialize
from .core import KnowledgeBase, QueryError, RoughELError
from .evaluator import answer, emit_relational, facts_csv, prepare
from .normalizer import normalize_kb
from .rewriter import rewrite
from .saturator import saturate
from .textio import (
    ParseError, parse_kb, parse_query, serialize_foquery, serialize_kb,
    serialize_query, serialize_structure,
)

__all__ = ["main"]


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _kb(path) -> KnowledgeBase:
    return parse_kb(_read(path))


def _query(path):
    return parse_query(_read(path))


def _tuples(rows, boolean) -> str:
    if boolean:
        return "true\n" if rows else "false\n"
    return "".join(" ".join(t) + "\n" for t in rows)


def _write(out, text):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_normalize(args):
    kb = _kb(args.kb)
    ntbox, nkb = normalize_kb(kb)
    _write(args.output, serialize_kb(nkb))
    return 0


def cmd_materialize(args):
    kb = _kb(args.kb)
    _, s = prepare(kb)
    _write(args.output, serialize_structure(s))
    return 0


def cmd_rewrite(args):
    q = _query(args.query)
    ris = _kb(args.ris).ris if args.ris else ()
    _write(args.output, serialize_foquery(rewrite(q, ris)))
    return 0


def cmd_answer(args):
    kb, q = _kb(args.kb), _query(args.query)
    sys.stdout.write(_tuples(answer(kb, q), not q.answer_vars))
    return 0


def _check_one(kb, q, depth, label=""):
    from .oracle import certain_answers_oracle
    got = answer(kb, q)
    ref = certain_answers_oracle(kb, q, depth=depth)
    boolean = not q.answer_vars
    head = f"== {label}\n" if label else ""
    sys.stdout.write(head + "answer:\n" + _tuples(got, boolean)
                     + "oracle:\n" + _tuples(ref, boolean))
    same = got == ref
    sys.stdout.write("DIFF: none\n" if same else "DIFF: mismatch\n")
    return same


def cmd_check(args):
    target = Path(args.kb)
    if target.is_dir():
        return _check_dir(target, args.depth)
    if args.query is None:
        raise SystemExit("check: a query file is required unless a directory is given")
    ok = _check_one(_kb(target), _query(args.query), args.depth)
    return 0 if ok else 1


def _check_dir(d: Path, depth):
    """Every .rkb against every .rcq in ``d`` whose individuals it knows."""
    kbs = sorted(d.glob("*.rkb"))
    qs = sorted(d.glob("*.rcq"))
    parsed_q = [(p, _query(p)) for p in qs]
    status, ran = 0, 0
    for kp in kbs:
        kb = _kb(kp)
        try:
            sat = saturate(kb)
        except RoughELError as e:
            print(f"== {kp.name}: {e}", file=sys.stderr)
            status = 1
            continue
        if sat.inconsistent:
            print(f"== {kp.name}: inconsistent, skipped")
            continue
        for qp, q in parsed_q:
            if q.individuals() - kb.individuals():
                continue
            ran += 1
            if not _check_one(kb, q, depth, f"{kp.name} {qp.name}"):
                status = 1
    print(f"checked {ran} pair(s)")
    return status


def cmd_emit_sql(args):
    kb, q = _kb(args.kb), _query(args.query)
    _, s = prepare(kb, q)
    schema, sql = emit_relational(s, rewrite(q, kb.ris))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "schema.sql").write_text(schema, encoding="utf-8")
    (out / "query.sql").write_text(sql, encoding="utf-8")
    for name, text in facts_csv(s).items():
        (out / f"{name}.csv").write_text(text, encoding="utf-8")
    return 0


def cmd_fuzz(args):
    from .fuzz import campaign, case
    outcomes = campaign(args.seed, args.cases, workers=args.workers,
                        stability=not args.no_stability)
    bad = [o for o in outcomes if o.status in ("mismatch", "unstable")]
    skipped = sum(o.status == "inconsistent" for o in outcomes)
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for o in bad:
        kb, q = case(args.seed, o.index)
        stem = f"seed{args.seed}-case{o.index}"
        print(f"== {stem} {o.status}: answer={o.answer} oracle={o.oracle}"
              f" oracle(D+2)={o.oracle_deeper}")
        if outdir:
            (outdir / f"{stem}.rkb").write_text(serialize_kb(kb), encoding="utf-8")
            (outdir / f"{stem}.rcq").write_text(serialize_query(q), encoding="utf-8")
        else:
            print(f"-- {stem}.rkb\n{serialize_kb(kb)}-- {stem}.rcq\n{serialize_query(q)}")
    print(f"{len(outcomes)} cases, {skipped} inconsistent, {len(bad)} failing")
    return 1 if bad else 0


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="roughel",
        description="Conjunctive query answering over rough EL knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("normalize", help="print the normalized knowledge base")
    c.add_argument("kb")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_normalize)

    c = sub.add_parser("materialize", help="print the reachable canonical structure")
    c.add_argument("kb")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_materialize)

    c = sub.add_parser("rewrite", help="print the filtered rewriting of a query")
    c.add_argument("query")
    c.add_argument("--ris", metavar="KB", help="take role inclusions from this KB")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_rewrite)

    c = sub.add_parser("answer", help="print certain answers, one per line")
    c.add_argument("kb")
    c.add_argument("query")
    c.set_defaults(func=cmd_answer)

    c = sub.add_parser("check", help="compare answer() with the unraveling oracle")
    c.add_argument("kb", help="a .rkb file, or a directory of .rkb/.rcq files")
    c.add_argument("query", nargs="?")
    c.add_argument("--depth", type=int)
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("emit-sql", help="write schema.sql, query.sql and CSV facts")
    c.add_argument("kb")
    c.add_argument("query")
    c.add_argument("--outdir", required=True)
    c.set_defaults(func=cmd_emit_sql)

    c = sub.add_parser("fuzz", help="randomized oracle-equivalence campaign")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cases", type=int, default=100)
    c.add_argument("--workers", type=int)
    c.add_argument("--out", help="write failing cases here as .rkb/.rcq pairs")
    c.add_argument("--no-stability", action="store_true",
                   help="skip the deeper oracle run")
    c.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, QueryError, OSError, UnicodeDecodeError) as e:
        print(f"roughel: error: {e}", file=sys.stderr)
        return 2
    except RoughELError as e:
        print(f"roughel: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
