"""
Normal form for rough ELH TBoxes.

Every output GCI has one of the six shapes

    A ⊓ B ⊑ C     ∃r.A ⊑ B     A ⊑ ∃r.B
    A ⊑ Lower(B)  A ⊑ Upper(B) Lower(A) ⊑ B

with A, B concept names or TOP, and C a name, TOP or BOT.  A plain
``A ⊑ B`` counts as ``A ⊓ TOP ⊑ B``.  Complex subconcepts are named by
fresh ``_N<k>`` names, one per (subconcept, polarity), so the result is
a conservative extension of the input.  ``Upper(F) ⊑ D`` uses ρ
symmetry: it holds iff ``F ⊑ Lower(Y)`` and ``Y ⊑ D`` for fresh ``Y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import (
    BOT, GCI, RI, TOP, And, Bot, ConceptAssertion, Exists, KnowledgeBase,
    Lower, Name, Top, Upper, concept_names,
)

__all__ = ["NormalizedTBox", "normalize", "normalize_kb", "normal_shape",
           "simplify"]


@dataclass(frozen=True)
class NormalizedTBox:
    axioms: frozenset
    ris: frozenset
    fresh_names: frozenset
    # right-polarity fresh name -> the concept it stands for
    definitions: dict = field(default_factory=dict, compare=False)
    # every fresh name -> (concept, "L" or "R")
    origin: dict = field(default_factory=dict, compare=False)

    @property
    def tbox(self) -> frozenset:
        return self.axioms | self.ris


def _atomic(c) -> bool:
    return isinstance(c, (Name, Top))


def normal_shape(ax: GCI) -> str | None:
    """Tag of the normal shape matched by ``ax``, or None."""
    l, r = ax.lhs, ax.rhs
    if _atomic(l):
        if isinstance(r, (Name, Top, Bot)):
            return "and"
        if isinstance(r, Exists) and _atomic(r.filler):
            return "some-r"
        if isinstance(r, Lower) and _atomic(r.arg):
            return "lower-r"
        if isinstance(r, Upper) and _atomic(r.arg):
            return "upper-r"
        return None
    if isinstance(l, And) and _atomic(l.left) and _atomic(l.right):
        return "and" if isinstance(r, (Name, Top, Bot)) else None
    if isinstance(l, Exists) and _atomic(l.filler) and _atomic(r):
        return "some-l"
    if isinstance(l, Lower) and _atomic(l.arg) and _atomic(r):
        return "lower-l"
    return None


def _flatten(c):
    if isinstance(c, And):
        return _flatten(c.left) + _flatten(c.right)
    return [c]


def simplify(c):
    """Push TOP and BOT through the constructors."""
    if isinstance(c, And):
        parts = [simplify(p) for p in _flatten(c)]
        if any(isinstance(p, Bot) for p in parts):
            return BOT
        parts = [p for p in parts if not isinstance(p, Top)]
        if not parts:
            return TOP
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = And(p, out)
        return out
    if isinstance(c, Exists):
        f = simplify(c.filler)
        return BOT if isinstance(f, Bot) else Exists(c.role, f)
    if isinstance(c, (Upper, Lower)):
        a = simplify(c.arg)
        if isinstance(a, (Top, Bot)):
            return a
        return type(c)(a)
    return c


class _Normalizer:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = itertools.count()
        self.out = {}                 # ordered set of emitted GCIs
        self.memo = {}                # (concept, polarity) -> Name
        self.definitions = {}
        self.origin = {}

    def fresh(self, concept, pol) -> Name:
        key = (concept, pol)
        if key not in self.memo:
            while True:
                n = f"_N{next(self.counter)}"
                if n not in self.taken:
                    break
            self.taken.add(n)
            self.memo[key] = Name(n)
            self.origin[n] = key
            if pol == "R":
                self.definitions[n] = concept
        return self.memo[key]

    def emit(self, lhs, rhs):
        self.out[GCI(lhs, rhs)] = None

    # left side ---------------------------------------------------------

    def left_shape(self, c):
        """A left-normal concept C' with C ≡ C' modulo fresh names;
        None when C is unsatisfiable."""
        if isinstance(c, (Name, Top)):
            return c
        if isinstance(c, Bot):
            return None
        if isinstance(c, And):
            atoms = []
            for p in _flatten(c):
                a = self.left_atom(p)
                if a is None:
                    return None
                if not isinstance(a, Top):
                    atoms.append(a)
            if not atoms:
                return TOP
            while len(atoms) > 2:
                atoms = [self.atomize(And(atoms[0], atoms[1]))] + atoms[2:]
            return atoms[0] if len(atoms) == 1 else And(atoms[0], atoms[1])
        if isinstance(c, (Exists, Lower, Upper)):
            inner = c.filler if isinstance(c, Exists) else c.arg
            f = self.left_atom(inner)
            if f is None:
                return None
            if isinstance(c, Exists):
                return Exists(c.role, f)
            if isinstance(f, Top):
                return TOP
            if isinstance(c, Lower):
                return Lower(f)
            y = self.fresh(Upper(f), "L")
            self.emit(f, Lower(y))
            return y
        raise TypeError(c)

    def atomize(self, shape):
        if _atomic(shape):
            return shape
        x = self.fresh(shape, "L")
        self.emit(shape, x)
        return x

    def left_atom(self, c):
        shape = self.left_shape(c)
        return None if shape is None else self.atomize(shape)

    # right side --------------------------------------------------------

    def right_atom(self, c):
        if isinstance(c, (Name, Top, Bot)):
            return c
        x = self.fresh(c, "R")
        if GCI(x, c) not in self.seen:
            self.seen.add(GCI(x, c))
            self.gci(x, c)
        return x

    def gci(self, lhs, rhs):
        lhs, rhs = simplify(lhs), simplify(rhs)
        parts = [p for p in _flatten(rhs) if not isinstance(p, Top)]
        if not parts:
            return
        shape = self.left_shape(lhs)
        if shape is None:
            return
        for p in parts:
            self.right(shape, p)

    def right(self, shape, p):
        if isinstance(p, Name) or (isinstance(p, Bot) and not
                                   isinstance(shape, (Exists, Lower))):
            self.emit(shape, p)
            return
        a = self.atomize(shape)
        if isinstance(p, Bot):
            self.emit(a, BOT)
            return
        inner = p.filler if isinstance(p, Exists) else p.arg
        f = self.right_atom(inner)
        if isinstance(p, Exists):
            self.emit(a, Exists(p.role, f))
        else:
            self.emit(a, type(p)(f))

    def run(self, gcis):
        self.seen = set()
        for ax in gcis:
            self.gci(ax.lhs, ax.rhs)


def _sorted(axioms):
    from .textio import _axiom_line
    return sorted(axioms, key=_axiom_line)


def _result(nz, ris) -> NormalizedTBox:
    return NormalizedTBox(
        axioms=frozenset(nz.out), ris=frozenset(ris),
        fresh_names=frozenset(nz.origin), definitions=dict(nz.definitions),
        origin=dict(nz.origin))


def normalize(tbox) -> NormalizedTBox:
    """Normal form of a set of axioms (GCIs and RIs)."""
    tbox = list(tbox)
    gcis = _sorted(ax for ax in tbox if isinstance(ax, GCI))
    ris = [ax for ax in tbox if isinstance(ax, RI)]
    taken = set()
    for ax in gcis:
        taken |= concept_names(ax.lhs) | concept_names(ax.rhs)
    nz = _Normalizer(taken)
    nz.run(gcis)
    return _result(nz, ris)


def normalize_kb(kb: KnowledgeBase) -> tuple[NormalizedTBox, KnowledgeBase]:
    """Normalize the TBox and replace complex concept assertions C(a)
    by Q(a) with a fresh Q ⊑ C.  The fresh-name counter is shared;
    assertions equivalent to TOP(a) become exactly TOP(a)."""
    gcis = _sorted(kb.gcis)
    nz = _Normalizer(kb.concept_names())
    nz.run(gcis)
    abox = set()
    for a in _sorted(kb.abox):
        if not isinstance(a, ConceptAssertion):
            abox.add(a)
            continue
        c = simplify(a.concept)
        if isinstance(c, Top):
            # kept so that the individual still exists
            abox.add(ConceptAssertion(TOP, a.ind))
            continue
        if isinstance(c, Bot):
            x = nz.fresh(BOT, "R")
            nz.emit(x, BOT)
        else:
            x = nz.right_atom(c)
        abox.add(ConceptAssertion(x, a.ind))
    ntb = _result(nz, kb.ris)
    return ntb, KnowledgeBase(ntb.tbox, abox)
