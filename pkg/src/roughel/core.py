"""
Core types for rough ELH knowledge bases.

Concepts, axioms, assertions and conjunctive queries are immutable,
hashable trees.  Names (concept, role, individual, variable) are plain
Python strings; the position in a tree fixes the kind of a name.

``FiniteStructure`` is a finite interpretation whose indiscernibility
relation is stored twice: as the seed edge set ``rho_seed`` and as the
partition ``rho_partition`` of the domain into granules.  The semantic
functions ``eval_concept`` and ``model_check`` work on any such
structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from scipy.cluster.hierarchy import DisjointSet

__all__ = [
    "Concept", "Top", "Bot", "Name", "And", "Exists", "Upper", "Lower",
    "TOP", "BOT", "conj",
    "GCI", "RI", "ConceptAssertion", "RoleAssertion", "IndiscAssertion",
    "KnowledgeBase",
    "Var", "Ind", "ConceptAtom", "RoleAtom", "RhoAtom", "RhoEllAtom",
    "ConjunctiveQuery",
    "Named", "ConceptRep", "UpperRep", "LowerRep", "seed_of", "is_seed",
    "FiniteStructure", "make_structure", "rho_closure",
    "subconcepts", "concept_names", "eval_concept", "model_check",
    "violations", "RoughELError", "QueryError",
]


class RoughELError(Exception):
    """Logic-level error (inconsistency, role synonyms, bad query)."""


class QueryError(RoughELError):
    pass


# ---------------------------------------------------------------------------
# concepts
# ---------------------------------------------------------------------------

class Concept:
    __slots__ = ()

    def __str__(self):
        return render_concept(self)


@dataclass(frozen=True, repr=False)
class Top(Concept):
    def __repr__(self):
        return "TOP"


@dataclass(frozen=True, repr=False)
class Bot(Concept):
    def __repr__(self):
        return "BOT"


@dataclass(frozen=True)
class Name(Concept):
    name: str


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: str
    filler: Concept


@dataclass(frozen=True)
class Upper(Concept):
    arg: Concept


@dataclass(frozen=True)
class Lower(Concept):
    arg: Concept


TOP = Top()
BOT = Bot()


def conj(*cs: Concept) -> Concept:
    """Right-folded binary conjunction; ``conj()`` is TOP."""
    if not cs:
        return TOP
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = And(c, out)
    return out


def render_concept(c: Concept) -> str:
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bot):
        return "bottom"
    if isinstance(c, And):
        parts = []
        while isinstance(c, And):
            parts.append(render_concept(c.left))
            c = c.right
        parts.append(render_concept(c))
        return "(and " + " ".join(parts) + ")"
    if isinstance(c, Exists):
        return f"(some {c.role} {render_concept(c.filler)})"
    if isinstance(c, Upper):
        return f"(upper {render_concept(c.arg)})"
    if isinstance(c, Lower):
        return f"(lower {render_concept(c.arg)})"
    raise TypeError(c)


def _sub(c: Concept):
    yield c
    if isinstance(c, And):
        yield from _sub(c.left)
        yield from _sub(c.right)
    elif isinstance(c, Exists):
        yield from _sub(c.filler)
    elif isinstance(c, (Upper, Lower)):
        yield from _sub(c.arg)


def concept_names(c: Concept) -> set[str]:
    return {d.name for d in _sub(c) if isinstance(d, Name)}


def concept_roles(c: Concept) -> set[str]:
    return {d.role for d in _sub(c) if isinstance(d, Exists)}


# ---------------------------------------------------------------------------
# axioms, assertions, knowledge bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GCI:
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True)
class RI:
    sub: str
    sup: str


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept
    ind: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    a: str
    b: str


@dataclass(frozen=True)
class IndiscAssertion:
    a: str
    b: str


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: frozenset = frozenset()
    abox: frozenset = frozenset()

    def __init__(self, tbox: Iterable = (), abox: Iterable = ()):
        object.__setattr__(self, "tbox", frozenset(tbox))
        object.__setattr__(self, "abox", frozenset(abox))

    @property
    def gcis(self):
        return [ax for ax in self.tbox if isinstance(ax, GCI)]

    @property
    def ris(self):
        return [ax for ax in self.tbox if isinstance(ax, RI)]

    def individuals(self) -> set[str]:
        out = set()
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                out.add(a.ind)
            else:
                out.update((a.a, a.b))
        return out

    def concept_names(self) -> set[str]:
        out = set()
        for ax in self.gcis:
            out |= concept_names(ax.lhs) | concept_names(ax.rhs)
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                out |= concept_names(a.concept)
        return out

    def role_names(self) -> set[str]:
        out = set()
        for ax in self.tbox:
            if isinstance(ax, RI):
                out.update((ax.sub, ax.sup))
            else:
                out |= concept_roles(ax.lhs) | concept_roles(ax.rhs)
        for a in self.abox:
            if isinstance(a, RoleAssertion):
                out.add(a.role)
            elif isinstance(a, ConceptAssertion):
                out |= concept_roles(a.concept)
        return out


def subconcepts(kb: KnowledgeBase) -> set[Concept]:
    """All concepts and their subterms occurring in GCIs and concept
    assertions, without TOP and BOT."""
    out = set()
    roots = [c for ax in kb.gcis for c in (ax.lhs, ax.rhs)]
    roots += [a.concept for a in kb.abox if isinstance(a, ConceptAssertion)]
    for r in roots:
        out.update(_sub(r))
    out.discard(TOP)
    out.discard(BOT)
    return out


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Ind:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ConceptAtom:
    concept: Concept
    term: object

    @property
    def terms(self):
        return (self.term,)


@dataclass(frozen=True)
class RoleAtom:
    role: str
    s: object
    t: object

    @property
    def terms(self):
        return (self.s, self.t)


@dataclass(frozen=True)
class RhoAtom:
    s: object
    t: object

    @property
    def terms(self):
        return (self.s, self.t)


@dataclass(frozen=True)
class RhoEllAtom:
    s: object
    t: object

    @property
    def terms(self):
        return (self.s, self.t)


@dataclass(frozen=True)
class ConjunctiveQuery:
    answer_vars: tuple
    atoms: frozenset

    def __init__(self, answer_vars: Iterable = (), atoms: Iterable = ()):
        av = tuple(v if isinstance(v, Var) else Var(v) for v in answer_vars)
        object.__setattr__(self, "answer_vars", av)
        object.__setattr__(self, "atoms", frozenset(atoms))
        if len(set(av)) != len(av):
            raise QueryError("answer variables must be pairwise distinct")
        used = self.terms()
        for v in av:
            if v not in used:
                raise QueryError(f"answer variable {v.name} occurs in no atom")

    def terms(self) -> set:
        return {t for at in self.atoms for t in at.terms}

    def variables(self) -> set:
        return {t for t in self.terms() if isinstance(t, Var)}

    def individuals(self) -> set[str]:
        return {t.name for t in self.terms() if isinstance(t, Ind)}

    def quantified(self) -> set:
        return self.variables() - set(self.answer_vars)


# ---------------------------------------------------------------------------
# domain elements of canonical structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Named:
    ind: str

    def __str__(self):
        return self.ind


@dataclass(frozen=True)
class ConceptRep:
    concept: Concept

    def __str__(self):
        return f"x[{self.concept}]"


@dataclass(frozen=True)
class UpperRep:
    concept: Concept
    seed: object

    def __str__(self):
        return f"x[{self.concept},{self.seed}]"


@dataclass(frozen=True)
class LowerRep:
    seed: object

    def __str__(self):
        return f"l[{self.seed}]"


def is_seed(e) -> bool:
    return isinstance(e, (Named, ConceptRep))


def seed_of(e):
    if isinstance(e, (UpperRep, LowerRep)):
        return e.seed
    return e


# ---------------------------------------------------------------------------
# finite structures
# ---------------------------------------------------------------------------

def rho_closure(domain: Iterable, pairs: Iterable) -> tuple[frozenset, ...]:
    """Granules of the equivalence closure of ``pairs`` over ``domain``."""
    dom = list(domain)
    ds = DisjointSet(dom)
    for x, y in pairs:
        if x in ds and y in ds:
            ds.merge(x, y)
    return tuple(frozenset(s) for s in ds.subsets())


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    domain: frozenset
    concept_ext: Mapping
    role_ext: Mapping
    rho_seed: frozenset
    rho_partition: tuple
    rho_ell: frozenset = frozenset()
    aux: frozenset = frozenset()
    aux_rho: frozenset = frozenset()
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()
    _granule: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for g in self.rho_partition:
            for e in g:
                self._granule[e] = g

    def granule(self, e) -> frozenset:
        return self._granule[e]

    def ext(self, name: str) -> frozenset:
        return self.concept_ext.get(name, frozenset())

    def rel(self, role: str) -> frozenset:
        return self.role_ext.get(role, frozenset())

    def rho(self, x, y) -> bool:
        return self._granule[x] is self._granule[y]

    def __eq__(self, other):
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        norm = lambda m: {k: v for k, v in m.items() if v}
        return (self.domain == other.domain
                and norm(self.concept_ext) == norm(other.concept_ext)
                and norm(self.role_ext) == norm(other.role_ext)
                and self.rho_seed == other.rho_seed
                and set(self.rho_partition) == set(other.rho_partition)
                and self.rho_ell == other.rho_ell
                and self.aux == other.aux and self.aux_rho == other.aux_rho
                and self.concepts == other.concepts
                and self.roles == other.roles)

    __hash__ = None


def make_structure(domain, concept_ext=None, role_ext=None, rho_seed=(),
                   rho_ell=(), aux=(), aux_rho=(), concepts=(), roles=()):
    """Build a structure; the partition is the closure of ``rho_seed``.

    Extensions and pairs are restricted to ``domain``; the signature is
    the union of the given names and the extension keys.
    """
    dom = frozenset(domain)
    cext = {k: frozenset(v) & dom for k, v in (concept_ext or {}).items()}
    rext = {k: frozenset((x, y) for x, y in v if x in dom and y in dom)
            for k, v in (role_ext or {}).items()}
    seed = frozenset((x, y) for x, y in rho_seed if x in dom and y in dom)
    return FiniteStructure(
        domain=dom, concept_ext=cext, role_ext=rext, rho_seed=seed,
        rho_partition=rho_closure(dom, seed),
        rho_ell=frozenset((x, y) for x, y in rho_ell if x in dom and y in dom),
        aux=frozenset(aux) & dom, aux_rho=frozenset(aux_rho) & dom,
        concepts=frozenset(concepts) | frozenset(cext),
        roles=frozenset(roles) | frozenset(rext),
    )


# ---------------------------------------------------------------------------
# semantics
# ---------------------------------------------------------------------------

def eval_concept(s: FiniteStructure, c: Concept) -> frozenset:
    if isinstance(c, Top):
        return s.domain
    if isinstance(c, Bot):
        return frozenset()
    if isinstance(c, Name):
        return s.ext(c.name)
    if isinstance(c, And):
        return eval_concept(s, c.left) & eval_concept(s, c.right)
    if isinstance(c, Exists):
        inner = eval_concept(s, c.filler)
        return frozenset(x for x, y in s.rel(c.role) if y in inner)
    if isinstance(c, Upper):
        inner = eval_concept(s, c.arg)
        return frozenset(e for g in s.rho_partition if g & inner for e in g)
    if isinstance(c, Lower):
        inner = eval_concept(s, c.arg)
        return frozenset(e for g in s.rho_partition if g <= inner for e in g)
    raise TypeError(c)


def violations(s: FiniteStructure, kb: KnowledgeBase) -> list:
    """Axioms and assertions of ``kb`` not satisfied by ``s``."""
    bad = []
    for ax in kb.tbox:
        if isinstance(ax, RI):
            if not s.rel(ax.sub) <= s.rel(ax.sup):
                bad.append(ax)
        elif not eval_concept(s, ax.lhs) <= eval_concept(s, ax.rhs):
            bad.append(ax)
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            ok = Named(a.ind) in eval_concept(s, a.concept)
        elif isinstance(a, RoleAssertion):
            ok = (Named(a.a), Named(a.b)) in s.rel(a.role)
        else:
            x, y = Named(a.a), Named(a.b)
            ok = x in s.domain and y in s.domain and s.rho(x, y)
        if not ok:
            bad.append(a)
    return bad


def model_check(s: FiniteStructure, kb: KnowledgeBase) -> bool:
    return not violations(s, kb)
