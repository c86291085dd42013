"""
Filtered first-order rewriting of conjunctive queries.

``rewrite(q, ris)`` returns the unfolded core of ``q`` together with
filter conditions that reject matches which only exist because the
canonical structure reuses auxiliary elements:

* ``NotAux(v)`` / ``NotAuxRho(v)``: v is not a concept representative /
  not an approximation representative;
* ``Guarded(t, eqs)``: if t is a concept representative then all the
  equalities hold;
* ``GuardedOr(t, atoms)``: if t is a concept representative then one of
  the role atoms holds.

Term classes, predecessor sets and the fork and cycle sets are computed
on the original query; variables introduced by unfolding take no part.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from scipy.cluster.hierarchy import DisjointSet

from .core import (
    And, Bot, ConceptAtom, ConjunctiveQuery, Exists, Ind, Lower, Name,
    RhoAtom, RhoEllAtom, RoleAtom, Top, Upper, Var,
)
from .saturator import role_closure

__all__ = [
    "NotAux", "NotAuxRho", "Guarded", "GuardedOr", "FOQuery",
    "TermPartition", "FilterSets", "term_key", "rho_equiv", "r_equiv",
    "pre_in_sets", "implicants", "prime_implicants", "filter_sets",
    "unfold", "rewrite", "first", "last",
]


@dataclass(frozen=True)
class NotAux:
    term: object


@dataclass(frozen=True)
class NotAuxRho:
    term: object


@dataclass(frozen=True)
class Guarded:
    guard: object
    equalities: tuple


@dataclass(frozen=True)
class GuardedOr:
    guard: object
    disjuncts: tuple


@dataclass(frozen=True)
class FOQuery:
    answer_vars: tuple
    core: frozenset
    filters: tuple
    quantified_vars: frozenset

    def size(self) -> int:
        n = len(self.core)
        for f in self.filters:
            n += 1 + len(getattr(f, "equalities", ())) + len(getattr(f, "disjuncts", ()))
        return n


@dataclass(frozen=True)
class TermPartition:
    classes: tuple
    representative: dict
    pre_rep: dict

    def cls(self, t) -> frozenset:
        for c in self.classes:
            if t in c:
                return c
        raise KeyError(t)


@dataclass(frozen=True)
class FilterSets:
    fork_neq: frozenset
    fork_eq: frozenset
    fork_h: frozenset
    cyc: frozenset


def term_key(t):
    """Individuals before variables, then by name."""
    return (0 if isinstance(t, Ind) else 1, t.name)


def _role_atoms(q):
    return sorted((a for a in q.atoms if isinstance(a, RoleAtom)),
                  key=lambda a: (a.role, term_key(a.s), term_key(a.t)))


def _classes(terms, ds) -> tuple:
    groups = defaultdict(set)
    for t in terms:
        groups[ds[t]].add(t)
    return tuple(sorted((frozenset(g) for g in groups.values()),
                        key=lambda c: min(map(term_key, c))))


def rho_equiv(q: ConjunctiveQuery) -> tuple:
    """Classes of the equivalence induced by the ρ atoms of ``q``."""
    terms = sorted(q.terms(), key=term_key)
    ds = DisjointSet(terms)
    for a in q.atoms:
        if isinstance(a, RhoAtom):
            ds.merge(a.s, a.t)
    return _classes(terms, ds)


def _lookup(partition):
    return {t: c for c in partition for t in c}


def first(ts):
    return ts[0]


def last(ts):
    return ts[-1]


def r_equiv(q: ConjunctiveQuery, rho_part, pick=first) -> TermPartition:
    """Least equivalence containing the pairs of role-atom targets that
    are ρ-related and closed under: r1(s,t), r2(s',t'), t ~ t' => s ~ s'.

    ``pick`` chooses representatives from a list of terms sorted by
    ``term_key``; ``first`` (the default) or ``last``.
    """
    terms = sorted(q.terms(), key=term_key)
    rho = _lookup(rho_part)
    ds = DisjointSet(terms)
    ras = _role_atoms(q)
    for a in ras:
        for b in ras:
            if rho[a.t] is rho[b.t]:
                ds.merge(a.t, b.t)
    changed = True
    while changed:
        changed = False
        for a in ras:
            for b in ras:
                if ds.connected(a.t, b.t) and not ds.connected(a.s, b.s):
                    ds.merge(a.s, b.s)
                    changed = True
    classes = _classes(terms, ds)
    pre, _ = _pre_in(ras, classes)
    rep = {c: pick(sorted(c, key=term_key)) for c in classes}
    pre_rep = {c: pick(sorted(p, key=term_key)) for c, p in pre.items() if p}
    return TermPartition(classes, rep, pre_rep)


def _pre_in(ras, classes):
    pre = {c: set() for c in classes}
    inn = {c: set() for c in classes}
    where = _lookup(classes)
    for a in ras:
        c = where[a.t]
        pre[c].add(a.s)
        inn[c].add(a.role)
    return ({c: frozenset(v) for c, v in pre.items()},
            {c: frozenset(v) for c, v in inn.items()})


def pre_in_sets(q: ConjunctiveQuery, part: TermPartition):
    """(Pre, In): class -> predecessor terms, class -> incoming roles."""
    return _pre_in(_role_atoms(q), part.classes)


def _closure(ris, roles):
    return role_closure(ris, roles)


def implicants(ris, roleset, universe=()) -> frozenset:
    """Roles r with r ⊑* s for every s in ``roleset`` (non-empty)."""
    roleset = set(roleset)
    cl = _closure(ris, set(universe) | roleset)
    return frozenset(r for r, sup in cl.items() if roleset <= sup)


def prime_implicants(ris, roleset, universe=()) -> frozenset:
    """Implicants r such that r ⊑* r' holds for no other implicant r'."""
    imp = implicants(ris, roleset, universe)
    cl = _closure(ris, set(universe) | set(roleset))
    return frozenset(r for r in imp if not any(o != r and o in cl[r] for o in imp))


def _cyc(q, part, rho_part) -> frozenset:
    terms = sorted(q.terms(), key=term_key)
    ds = DisjointSet(terms)
    for c in tuple(part.classes) + tuple(rho_part):
        c = sorted(c, key=term_key)
        for t in c[1:]:
            ds.merge(c[0], t)
    succ = defaultdict(set)
    for a in q.atoms:
        if isinstance(a, RoleAtom):
            succ[ds[a.s]].add(ds[a.t])
    nodes = {ds[t] for t in terms}

    def reach(n):
        seen, todo = set(), [n]
        while todo:
            for m in succ[todo.pop()]:
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen

    r = {n: reach(n) for n in nodes}
    on_cycle = {n for n in nodes if n in r[n]}
    return frozenset(v for v in q.quantified()
                     if ds[v] in on_cycle or r[ds[v]] & on_cycle)


def filter_sets(q: ConjunctiveQuery, part: TermPartition, ris) -> FilterSets:
    ris = list(ris)
    universe = {a.role for a in q.atoms if isinstance(a, RoleAtom)}
    pre, inn = pre_in_sets(q, part)
    where = _lookup(part.classes)
    fork_neq = frozenset(
        v for v in q.quantified()
        if inn[where[v]] and not implicants(ris, inn[where[v]], universe))
    fork_eq = frozenset((pre[c], c) for c in part.classes if len(pre[c]) >= 2)
    fork_h = set()
    for c in part.classes:
        if not pre[c] or not inn[c]:
            continue
        pi = prime_implicants(ris, inn[c], universe)
        if pi - inn[c]:
            fork_h.add((pi, c))
    rho_part = rho_equiv(q)
    return FilterSets(fork_neq, fork_eq, frozenset(fork_h),
                      _cyc(q, part, rho_part))


def _atom_key(a):
    from .textio import _atom_text
    return _atom_text(a)


def unfold(q: ConjunctiveQuery) -> ConjunctiveQuery:
    """Replace complex concept atoms by atomic ones:

    Upper(C)(x)  ->  ρ(x,y), C(y)
    Lower(C)(x)  ->  ρ(x,y1), ρℓ(y1,y2), C(y2)
    (C ⊓ D)(x)   ->  C(x), D(x)
    (∃r.C)(x)    ->  r(x,y), C(y)
    """
    used = {t.name for t in q.terms()}
    counter = [0]

    def fresh():
        while f"_u{counter[0]}" in used:
            counter[0] += 1
        v = f"_u{counter[0]}"
        used.add(v)
        return Var(v)

    out = []

    def go(c, t):
        if isinstance(c, (Name, Top, Bot)):
            out.append(ConceptAtom(c, t))
        elif isinstance(c, And):
            go(c.left, t)
            go(c.right, t)
        elif isinstance(c, Exists):
            y = fresh()
            out.append(RoleAtom(c.role, t, y))
            go(c.filler, y)
        elif isinstance(c, Upper):
            y = fresh()
            out.append(RhoAtom(t, y))
            go(c.arg, y)
        elif isinstance(c, Lower):
            y1, y2 = fresh(), fresh()
            out.append(RhoAtom(t, y1))
            out.append(RhoEllAtom(y1, y2))
            go(c.arg, y2)
        else:
            raise TypeError(c)

    for a in sorted(q.atoms, key=_atom_key):
        if isinstance(a, ConceptAtom):
            go(a.concept, a.term)
        else:
            out.append(a)
    return ConjunctiveQuery(q.answer_vars, out)


def rewrite(q: ConjunctiveQuery, ris=(), pick=first) -> FOQuery:
    ris = list(ris)
    part = r_equiv(q, rho_equiv(q), pick)
    fs = filter_sets(q, part, ris)
    core = unfold(q)

    filters = []
    not_aux = set(q.answer_vars) | fs.fork_neq | fs.cyc
    filters += [NotAux(v) for v in sorted(not_aux, key=term_key)]
    filters += [NotAuxRho(v) for v in sorted(q.answer_vars, key=term_key)]
    for pre, c in sorted(fs.fork_eq, key=lambda p: sorted(map(term_key, p[1]))):
        ts = sorted(pre, key=term_key)
        eqs = tuple((ts[i], ts[i + 1]) for i in range(len(ts) - 1))
        filters.append(Guarded(part.representative[c], eqs))
    for imps, c in sorted(fs.fork_h, key=lambda p: sorted(map(term_key, p[1]))):
        t, tp = part.representative[c], part.pre_rep[c]
        filters.append(GuardedOr(t, tuple(RoleAtom(r, tp, t) for r in sorted(imps))))
    qv = frozenset(core.variables()) - set(q.answer_vars)
    return FOQuery(q.answer_vars, core.atoms, tuple(filters), qv)
