"""
Evaluation of rewritten queries over finite structures, the end-to-end
answering pipeline, and a relational (SQL) encoding.
"""

from __future__ import annotations

import csv
import io
import sqlite3
from collections import defaultdict

from .canonical import materialize
from .core import (
    Bot, ConceptAtom, ConjunctiveQuery, FiniteStructure, Ind,
    KnowledgeBase, Name, Named, RhoAtom, RhoEllAtom, RoleAtom,
    RoughELError, Top, Var,
)
from .normalizer import normalize_kb
from .rewriter import (
    FOQuery, Guarded, GuardedOr, NotAux, NotAuxRho, rewrite, term_key,
)
from .saturator import role_synonyms, saturate

__all__ = ["evaluate", "answer", "prepare", "validate", "emit_relational",
           "relational_facts", "run_sql", "facts_csv"]


# -- evaluation ---------------------------------------------------------------

class _Index:
    def __init__(self, s: FiniteStructure):
        self.s = s
        self.succ = {r: defaultdict(set) for r in s.role_ext}
        self.pred = {r: defaultdict(set) for r in s.role_ext}
        for r, ext in s.role_ext.items():
            for x, y in ext:
                self.succ[r][x].add(y)
                self.pred[r][y].add(x)
        self.ell = defaultdict(set)
        self.ell_inv = defaultdict(set)
        for x, y in s.rho_ell:
            self.ell[x].add(y)
            self.ell_inv[y].add(x)


def _check_signature(s: FiniteStructure, q: FOQuery):
    for a in q.core:
        if isinstance(a, ConceptAtom) and isinstance(a.concept, Name):
            if a.concept.name not in s.concepts:
                raise RoughELError(f"unknown concept name {a.concept.name}")
        elif isinstance(a, RoleAtom) and a.role not in s.roles:
            raise RoughELError(f"unknown role name {a.role}")
    for f in q.filters:
        for a in getattr(f, "disjuncts", ()):
            if a.role not in s.roles:
                raise RoughELError(f"unknown role name {a.role}")


def _unary(s, a):
    c = a.concept
    if isinstance(c, Top):
        return s.domain
    if isinstance(c, Bot):
        return frozenset()
    return s.ext(c.name)


def _holds(ix, a, val):
    s = ix.s
    if isinstance(a, ConceptAtom):
        return val(a.term) in _unary(s, a)
    if isinstance(a, RoleAtom):
        return val(a.t) in ix.succ[a.role].get(val(a.s), ())
    if isinstance(a, RhoAtom):
        return s.rho(val(a.s), val(a.t))
    if isinstance(a, RhoEllAtom):
        return val(a.t) in ix.ell.get(val(a.s), ())
    raise TypeError(a)


def _filter_ok(ix, f, val):
    s = ix.s
    if isinstance(f, NotAux):
        return val(f.term) not in s.aux
    if isinstance(f, NotAuxRho):
        return val(f.term) not in s.aux_rho
    if val(f.guard) not in s.aux:
        return True
    if isinstance(f, Guarded):
        return all(val(x) == val(y) for x, y in f.equalities)
    return any(_holds(ix, a, val) for a in f.disjuncts)


def _filter_terms(f):
    if isinstance(f, (NotAux, NotAuxRho)):
        return {f.term}
    if isinstance(f, Guarded):
        return {f.guard} | {t for p in f.equalities for t in p}
    return {f.guard} | {t for a in f.disjuncts for t in a.terms}


def _candidates(ix, v, atoms, env):
    """Values for ``v`` allowed by the atoms whose other terms are bound."""
    s = ix.s
    cand = None

    def meet(xs):
        nonlocal cand
        cand = set(xs) if cand is None else cand & set(xs)

    for a in atoms:
        if isinstance(a, ConceptAtom):
            meet(_unary(s, a))
            continue
        x, y = a.s, a.t
        if x == v and y == v:
            continue
        other, forward = (y, True) if x == v else (x, False)
        if other not in env:
            continue
        o = env[other]
        if isinstance(a, RoleAtom):
            meet((ix.pred if forward else ix.succ)[a.role].get(o, ()))
        elif isinstance(a, RhoAtom):
            meet(s.granule(o))
        else:
            meet((ix.ell_inv if forward else ix.ell).get(o, ()))
        if not cand:
            return cand
    return s.domain if cand is None else cand


def evaluate(s: FiniteStructure, q: FOQuery, order=None) -> list:
    """Answer tuples (individual names) of ``q`` over ``s``, sorted.

    Variables are bound most-constrained first unless ``order`` fixes a
    static binding order.
    """
    _check_signature(s, q)
    ix = _Index(s)
    env = {}
    for a in q.core:
        for t in a.terms:
            if isinstance(t, Ind):
                env[t] = Named(t.name)
    if any(e not in s.domain for e in env.values()):
        return []
    by_var = defaultdict(list)
    for a in q.core:
        for t in set(a.terms):
            if isinstance(t, Var):
                by_var[t].append(a)
    vars_ = sorted(by_var, key=term_key)
    if order is not None:
        vars_ = [v for v in order if v in by_var]
    ground = [a for a in q.core if not any(isinstance(t, Var) for t in a.terms)]
    if not all(_holds(ix, a, env.__getitem__) for a in ground):
        return []
    # each filter is checked once its last variable is bound
    filters_at = defaultdict(list)
    for f in q.filters:
        vs = [t for t in _filter_terms(f) if isinstance(t, Var)]
        if not vs:
            if not _filter_ok(ix, f, env.__getitem__):
                return []
            continue
        if any(v not in by_var for v in vs):
            raise RoughELError(f"filter on a variable outside the core: {f}")
        filters_at[frozenset(vs)].append(f)
    answer_vars = set(q.answer_vars)
    out = set()
    val = env.__getitem__

    def consistent(v):
        if v in answer_vars and not isinstance(env[v], Named):
            return False
        if not all(_holds(ix, a, val) for a in by_var[v]
                   if all(t in env for t in a.terms)):
            return False
        return all(_filter_ok(ix, f, val) for vs, fs in filters_at.items()
                   if v in vs and vs <= env.keys() for f in fs)

    def search(rest):
        """True if some total assignment extends ``env``."""
        if not rest:
            out.add(tuple(env[v].ind for v in q.answer_vars))
            return True
        if order is None:
            best = None
            for v in rest:
                c = _candidates(ix, v, by_var[v], env)
                if best is None or len(c) < len(best[1]):
                    best = (v, c)
                    if not c:
                        break
            v, cand = best
        else:
            v = rest[0]
            cand = _candidates(ix, v, by_var[v], env)
        rem = [w for w in rest if w != v]
        # with the answer tuple fixed, one witness is enough
        fixed = answer_vars <= env.keys()
        found = False
        for e in sorted(cand, key=str):
            env[v] = e
            ok = consistent(v) and search(rem)
            del env[v]
            if ok:
                found = True
                if fixed:
                    break
        return found

    search(vars_)
    return sorted(out)


# -- pipeline -----------------------------------------------------------------

def validate(kb: KnowledgeBase, q: ConjunctiveQuery | None = None):
    syn = role_synonyms(kb.ris)
    if syn:
        raise RoughELError(f"role synonyms {syn[0]} and {syn[1]}")
    if q is not None:
        unknown = q.individuals() - kb.individuals()
        if unknown:
            raise RoughELError(f"unknown individual(s) in query: "
                               f"{', '.join(sorted(unknown))}")


def _query_signature(q):
    from .core import concept_names, concept_roles
    cs, rs = set(), set()
    for a in q.atoms:
        if isinstance(a, ConceptAtom):
            cs |= concept_names(a.concept)
            rs |= concept_roles(a.concept)
        elif isinstance(a, RoleAtom):
            rs.add(a.role)
    return cs, rs


def prepare(kb: KnowledgeBase, q: ConjunctiveQuery | None = None):
    """Validate, normalize, saturate and materialize: (sat, I_K^re)."""
    validate(kb, q)
    sat = saturate(kb, normalize_kb(kb))
    if sat.inconsistent:
        raise RoughELError("knowledge base is inconsistent")
    cs, rs = _query_signature(q) if q is not None else (set(), set())
    return sat, materialize(kb, sat, extra_concepts=cs, extra_roles=rs)


def answer(kb: KnowledgeBase, q: ConjunctiveQuery) -> list:
    """Certain answers of ``q`` over ``kb`` via materialize + rewrite."""
    _, i_re = prepare(kb, q)
    return evaluate(i_re, rewrite(q, kb.ris))


# -- relational encoding ------------------------------------------------------

def _qi(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def _table(kind, name=None):
    return _qi(f"{kind}_{name}") if name is not None else _qi(kind)


def relational_facts(s: FiniteStructure) -> dict:
    """Table name -> (columns, sorted rows); elements as rendered text."""
    r = str
    t = {}
    t["dom"] = (("e",), sorted((r(e),) for e in s.domain))
    t["named"] = (("e",), sorted((r(e),) for e in s.domain if isinstance(e, Named)))
    for c in sorted(s.concepts):
        t[f"c_{c}"] = (("e",), sorted((r(e),) for e in s.ext(c)))
    for role in sorted(s.roles):
        t[f"r_{role}"] = (("s", "o"), sorted((r(x), r(y)) for x, y in s.rel(role)))
    t["rho"] = (("s", "o"), sorted((r(x), r(y)) for g in s.rho_partition
                                   for x in g for y in g))
    t["rho_ell"] = (("s", "o"), sorted((r(x), r(y)) for x, y in s.rho_ell))
    t["aux"] = (("e",), sorted((r(e),) for e in s.aux))
    t["aux_rho"] = (("e",), sorted((r(e),) for e in s.aux_rho))
    return t


def facts_csv(s: FiniteStructure) -> dict:
    """Table name -> CSV text with a header row."""
    out = {}
    for name, (cols, rows) in relational_facts(s).items():
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        out[name] = buf.getvalue()
    return out


def _lit(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def emit_relational(s: FiniteStructure, q: FOQuery) -> tuple[str, str]:
    """(schema, query) in plain SQL: joins for the core, NOT EXISTS for
    negated markers, OR blocks for guarded conditions."""
    _check_signature(s, q)
    schema = []
    for name, (cols, _) in relational_facts(s).items():
        coldefs = ", ".join(f"{c} TEXT NOT NULL" for c in cols)
        schema.append(f"CREATE TABLE {_qi(name)} ({coldefs});")
    schema_text = "\n".join(schema) + "\n"

    froms, where, col = [], [], {}

    def use(term, expr):
        if isinstance(term, Ind):
            where.append(f"{expr} = {_lit(term.name)}")
        elif term in col:
            where.append(f"{expr} = {col[term]}")
        else:
            col[term] = expr

    def ref(term):
        return _lit(term.name) if isinstance(term, Ind) else col[term]

    atoms = sorted(q.core, key=lambda a: str(a))
    for i, a in enumerate(atoms):
        al = f"t{i}"
        if isinstance(a, ConceptAtom):
            c = a.concept
            tab = "dom" if isinstance(c, (Top, Bot)) else f"c_{c.name}"
            froms.append(f"{_qi(tab)} AS {al}")
            if isinstance(c, Bot):
                where.append("1 = 0")
            use(a.term, f"{al}.e")
        else:
            tab = ("rho" if isinstance(a, RhoAtom) else
                   "rho_ell" if isinstance(a, RhoEllAtom) else f"r_{a.role}")
            froms.append(f"{_qi(tab)} AS {al}")
            use(a.s, f"{al}.s")
            use(a.t, f"{al}.o")

    def is_aux(term):
        return f"EXISTS (SELECT 1 FROM {_qi('aux')} WHERE e = {ref(term)})"

    for f in q.filters:
        if isinstance(f, NotAux):
            where.append(f"NOT {is_aux(f.term)}")
        elif isinstance(f, NotAuxRho):
            where.append(f"NOT EXISTS (SELECT 1 FROM {_qi('aux_rho')} "
                         f"WHERE e = {ref(f.term)})")
        elif isinstance(f, Guarded):
            eqs = " AND ".join(f"{ref(x)} = {ref(y)}" for x, y in f.equalities)
            where.append(f"(NOT {is_aux(f.guard)} OR ({eqs or '1 = 1'}))")
        elif isinstance(f, GuardedOr):
            alts = " OR ".join(
                f"EXISTS (SELECT 1 FROM {_qi('r_' + a.role)} "
                f"WHERE s = {ref(a.s)} AND o = {ref(a.t)})" for a in f.disjuncts)
            where.append(f"(NOT {is_aux(f.guard)} OR {alts or '1 = 0'})")
    for v in q.answer_vars:
        where.append(f"EXISTS (SELECT 1 FROM {_qi('named')} WHERE e = {col[v]})")

    select = ", ".join(f"{col[v]} AS {_qi(v.name)}" for v in q.answer_vars) or "1"
    sql = f"SELECT DISTINCT {select}"
    if froms:
        sql += "\nFROM " + ",\n     ".join(froms)
    if where:
        sql += "\nWHERE " + "\n  AND ".join(where)
    return schema_text, sql + ";\n"


def run_sql(s: FiniteStructure, q: FOQuery) -> list:
    """Execute the emitted SQL on an in-memory SQLite database."""
    schema, sql = emit_relational(s, q)
    con = sqlite3.connect(":memory:")
    try:
        con.executescript(schema)
        for name, (cols, rows) in relational_facts(s).items():
            marks = ", ".join("?" for _ in cols)
            con.executemany(f"INSERT INTO {_qi(name)} VALUES ({marks})", rows)
        rows = con.execute(sql).fetchall()
    finally:
        con.close()
    if not q.answer_vars:
        return [()] if rows else []
    return sorted({tuple(r) for r in rows})
