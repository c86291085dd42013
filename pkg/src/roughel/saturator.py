"""
Consequence-based saturation for normalized rough ELH knowledge bases.

The engine keeps a label set per element of the canonical universe
(named individuals, concept representatives x_C, lower representatives
l_e and upper representatives x_{C,e}) and applies the completion rules
below until nothing changes.  Every granule carries a ``low`` set: the
names known to hold at every member, which is also the label of its
lower representatives.

    R-and     A, B in L(u), A ⊓ B ⊑ C             =>  C in L(u)
    R-some+   A in L(u), A ⊑ ∃r.B                 =>  edge u -r-> x_B
    R-some-   edge u -r-> v, r ⊑* s, A in L(v),
              ∃s.A ⊑ C                            =>  C in L(u)
    R-low+    A in L(u), A ⊑ Lower(B)             =>  B in low(granule(u))
    R-low-    A in low(g), Lower(A) ⊑ B           =>  B in low(g)
    R-ell     A in L(l_e)                         =>  A in low(granule(e))
    R-up      A in L(u), A ⊑ Upper(B)             =>  x_{B,seed(u)} joins
                                                      granule(u) with
                                                      {B} ∪ low
    R-bot     BOT spreads to role predecessors and to whole granules

Upper representatives are created only when R-up fires.  A KB is
inconsistent iff BOT reaches a named individual.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from .core import (
    GCI, RI, TOP, And, ConceptAssertion, ConceptRep, Exists,
    IndiscAssertion, KnowledgeBase, Lower, LowerRep, Name, Named,
    RoleAssertion, RoughELError, Top, Upper, UpperRep, Bot, concept_names,
    seed_of,
)
from .normalizer import NormalizedTBox, normal_shape, normalize_kb

__all__ = ["SaturatedKB", "saturate", "entails_subsumption",
           "entails_assertion", "entailed_assertions",
           "entails_role_inclusion", "role_closure", "role_synonyms",
           "TOP_NAME", "BOT_NAME"]

TOP_NAME = "⊤"
BOT_NAME = "⊥"


def _nm(c) -> str:
    if isinstance(c, Top):
        return TOP_NAME
    if isinstance(c, Bot):
        return BOT_NAME
    return c.name


def role_closure(ris, roles=()) -> dict[str, frozenset]:
    """Map each role to its reflexive-transitive super-roles."""
    up = defaultdict(set)
    names = set(roles)
    for ri in ris:
        up[ri.sub].add(ri.sup)
        names.update((ri.sub, ri.sup))
    out = {}
    for r in names:
        seen, todo = {r}, [r]
        while todo:
            for s in up[todo.pop()]:
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
        out[r] = frozenset(seen)
    return out


def role_synonyms(ris):
    """A pair r != s with r ⊑* s and s ⊑* r, or None."""
    cl = role_closure(ris)
    for r in sorted(cl):
        for s in sorted(cl[r]):
            if s != r and r in cl.get(s, ()):
                return (r, s)
    return None


class _Granule:
    __slots__ = ("members", "low")

    def __init__(self):
        self.members = []
        self.low = set()


class _Engine:
    def __init__(self, ntbox: NormalizedTBox, abox, rep_names=()):
        self.defs = ntbox.definitions
        self.conj = defaultdict(list)
        self.exr = defaultdict(list)
        self.exl = defaultdict(list)
        self.lowr = defaultdict(list)
        self.upr = defaultdict(list)
        self.lowl = defaultdict(list)
        roles = set()
        for ax in ntbox.axioms:
            shape = normal_shape(ax)
            l, r = ax.lhs, ax.rhs
            if shape == "and":
                a, b = (l.left, l.right) if isinstance(l, And) else (l, TOP)
                a, b, c = _nm(a), _nm(b), _nm(r)
                self.conj[a].append((b, c))
                if a != b:
                    self.conj[b].append((a, c))
            elif shape == "some-r":
                self.exr[_nm(l)].append((r.role, _nm(r.filler)))
                roles.add(r.role)
            elif shape == "some-l":
                self.exl[_nm(l.filler)].append((l.role, _nm(r)))
                roles.add(l.role)
            elif shape == "lower-r":
                self.lowr[_nm(l)].append(_nm(r.arg))
            elif shape == "upper-r":
                self.upr[_nm(l)].append(_nm(r.arg))
            elif shape == "lower-l":
                self.lowl[_nm(l.arg)].append(_nm(r))
            else:
                raise ValueError(f"axiom not in normal form: {ax}")
        for a in abox:
            if isinstance(a, RoleAssertion):
                roles.add(a.role)
        self.sup = role_closure(ntbox.ris, roles)

        self.L = {}
        self.gran = {}
        self.out = defaultdict(set)
        self.inc = defaultdict(set)
        self.rho_edges = set()
        self.queue = deque()
        self.steps = 0

        # named individuals, their lower reps and ABox granules
        from scipy.cluster.hierarchy import DisjointSet
        inds = sorted({i for a in abox for i in
                       ((a.ind,) if isinstance(a, ConceptAssertion) else (a.a, a.b))})
        ds = DisjointSet(inds)
        for a in abox:
            if isinstance(a, IndiscAssertion):
                ds.merge(a.a, a.b)
                self.rho_edges.add((Named(a.a), Named(a.b)))
        for cls in ds.subsets():
            g = _Granule()
            for i in sorted(cls):
                self._join(Named(i), g)
                self._join(LowerRep(Named(i)), g)
                self.rho_edges.add((Named(i), LowerRep(Named(i))))
        for a in abox:
            if isinstance(a, ConceptAssertion):
                self.add(Named(a.ind), _nm(a.concept))
            elif isinstance(a, RoleAssertion):
                self.add_edge(Named(a.a), a.role, Named(a.b))
        for n in rep_names:
            self.rep(n)
        self.run()

    # elements ----------------------------------------------------------

    def concept_of(self, name: str):
        if name == TOP_NAME:
            return TOP
        return self.defs.get(name, Name(name))

    def _join(self, e, g):
        g.members.append(e)
        self.gran[e] = g
        self.L[e] = set()
        self.add(e, TOP_NAME)
        for x in list(g.low):
            self.add(e, x)

    def rep(self, name: str):
        x = ConceptRep(self.concept_of(name))
        if x not in self.L:
            g = _Granule()
            self._join(x, g)
            self._join(LowerRep(x), g)
            self.rho_edges.add((x, LowerRep(x)))
            self.add(x, name)
        return x

    def activate(self, u, name: str):
        seed = seed_of(u)
        x = UpperRep(self.concept_of(name), seed)
        if x not in self.L:
            self._join(x, self.gran[seed])
        self.add(x, name)
        if not isinstance(u, LowerRep):
            self.rho_edges.add((u, x))

    # rules -------------------------------------------------------------

    def add(self, u, x: str):
        lab = self.L[u]
        if x not in lab:
            lab.add(x)
            self.queue.append((u, x))

    def add_low(self, g, x: str):
        todo = [x]
        while todo:
            y = todo.pop()
            if y in g.low:
                continue
            g.low.add(y)
            for m in list(g.members):
                self.add(m, y)
            todo.extend(self.lowl.get(y, ()))

    def add_edge(self, u, r: str, v):
        if (r, v) in self.out[u]:
            return
        self.out[u].add((r, v))
        self.inc[v].add((r, u))
        sup = self.sup.get(r, frozenset((r,)))
        for x in list(self.L[v]):
            for s, c in self.exl.get(x, ()):
                if s in sup:
                    self.add(u, c)
        if BOT_NAME in self.L[v]:
            self.add(u, BOT_NAME)

    def run(self):
        while self.queue:
            u, x = self.queue.popleft()
            self.steps += 1
            lab = self.L[u]
            if x == BOT_NAME:
                self.add_low(self.gran[u], BOT_NAME)
                for _, p in list(self.inc[u]):
                    self.add(p, BOT_NAME)
            for y, c in self.conj.get(x, ()):
                if y in lab:
                    self.add(u, c)
            for r, b in self.exr.get(x, ()):
                self.add_edge(u, r, self.rep(b))
            for r, p in list(self.inc[u]):
                sup = self.sup.get(r, frozenset((r,)))
                for s, c in self.exl.get(x, ()):
                    if s in sup:
                        self.add(p, c)
            for b in self.lowr.get(x, ()):
                self.add_low(self.gran[u], b)
            for b in self.upr.get(x, ()):
                self.activate(u, b)
            if isinstance(u, LowerRep):
                self.add_low(self.gran[u], x)


@dataclass(frozen=True, eq=False)
class SaturatedKB:
    """Result of saturation.

    ``labels`` maps every created element to its concept names (the
    internal markers ``⊤``/``⊥`` included); ``edges`` holds told role
    edges ``(u, r, v)``; ``rho_edges`` the seed ρ pairs.
    """
    kb: KnowledgeBase
    ntbox: NormalizedTBox
    nkb: KnowledgeBase
    labels: dict
    edges: frozenset
    rho_edges: frozenset
    role_closure: dict
    granules: tuple
    inconsistent: bool
    steps: int

    def label(self, e) -> frozenset:
        return frozenset(self.labels.get(e, ()))

    def satisfiable(self, e) -> bool:
        return e in self.labels and BOT_NAME not in self.labels[e]


def saturate(kb: KnowledgeBase, normalized=None, rep_names=None) -> SaturatedKB:
    """Saturate ``kb``; the TBox is normalized first unless a
    ``(NormalizedTBox, KnowledgeBase)`` pair is passed in."""
    ntbox, nkb = normalized if normalized is not None else normalize_kb(kb)
    if rep_names is None:
        rep_names = sorted(kb.concept_names())
    eng = _Engine(ntbox, nkb.abox, rep_names)
    granules = {id(g): g for g in eng.gran.values()}
    edges = frozenset((u, r, v) for u, out in eng.out.items() for r, v in out)
    named_bot = any(isinstance(e, Named) and BOT_NAME in lab
                    for e, lab in eng.L.items())
    return SaturatedKB(
        kb=kb, ntbox=ntbox, nkb=nkb,
        labels={e: frozenset(lab) for e, lab in eng.L.items()},
        edges=edges, rho_edges=frozenset(eng.rho_edges),
        role_closure=eng.sup,
        granules=tuple(frozenset(g.members) for g in granules.values()),
        inconsistent=named_bot, steps=eng.steps,
    )


# -- entailment queries -------------------------------------------------------

def _fresh(prefix, taken):
    k = 0
    while f"{prefix}{k}" in taken:
        k += 1
    taken.add(f"{prefix}{k}")
    return f"{prefix}{k}"


def entailed_assertions(sat: SaturatedKB, concepts, inds=None) -> dict:
    """``{(C, a): K ⊨ C(a)}`` for all given concepts and individuals,
    from a single saturation of K extended by ``C ⊑ Q_C``."""
    kb = sat.kb
    known = kb.individuals()
    inds = sorted(known if inds is None else inds)
    for a in inds:
        if a not in known:
            raise RoughELError(f"unknown individual {a}")
    concepts = list(dict.fromkeys(concepts))
    if sat.inconsistent:
        return {(c, a): True for c in concepts for a in inds}
    taken = kb.concept_names() | set(sat.ntbox.fresh_names)
    marks = {c: _fresh("_Q", taken) for c in concepts}
    ext = KnowledgeBase(kb.tbox | {GCI(c, Name(q)) for c, q in marks.items()},
                        kb.abox)
    s2 = saturate(ext, rep_names=())
    return {(c, a): marks[c] in s2.labels[Named(a)]
            for c in concepts for a in inds}


def entails_assertion(sat: SaturatedKB, c, a: str) -> bool:
    if a not in sat.kb.individuals():
        raise RoughELError(f"unknown individual {a}")
    if isinstance(c, Top) or sat.inconsistent:
        return True
    if isinstance(c, Name):
        return c.name in sat.labels[Named(a)]
    return entailed_assertions(sat, [c], [a])[(c, a)]


def entails_subsumption(sat: SaturatedKB, c, d) -> bool:
    """K ⊨ c ⊑ d, via a fresh P ⊑ c and d ⊑ Q."""
    if isinstance(d, Top) or isinstance(c, Bot) or sat.inconsistent:
        return True
    if isinstance(c, Name) and isinstance(d, Name):
        x = ConceptRep(c)
        if x in sat.labels and c.name in sat.kb.concept_names():
            lab = sat.labels[x]
            return d.name in lab or BOT_NAME in lab
    kb = sat.kb
    taken = kb.concept_names() | set(sat.ntbox.fresh_names)
    p, q = _fresh("_P", taken), _fresh("_Q", taken)
    ext = KnowledgeBase(kb.tbox | {GCI(Name(p), c), GCI(d, Name(q))}, kb.abox)
    s2 = saturate(ext, rep_names=(p,))
    lab = s2.labels[ConceptRep(Name(p))]
    return q in lab or BOT_NAME in lab


def entails_role_inclusion(sat: SaturatedKB, r: str, s: str) -> bool:
    return r == s or s in sat.role_closure.get(r, ())
