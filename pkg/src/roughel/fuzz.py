"""
Random knowledge bases and queries for differential testing.

Bounds: at most 8 concept names, 4 roles, 6 individuals, 12 TBox
axioms, 10 ABox assertions; queries have at most 6 atoms and 2 answer
variables.  Whenever a complex concept is drawn, it is an upper or
lower approximation with probability ``APPROX``.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .core import (
    BOT, GCI, RI, TOP, And, ConceptAssertion, ConceptAtom, ConjunctiveQuery,
    Exists, Ind, IndiscAssertion, KnowledgeBase, Lower, Name, RhoAtom,
    RoleAssertion, RoleAtom, RoughELError, Upper, Var,
)

__all__ = ["Bounds", "random_concept", "random_tbox", "random_kb",
           "random_query", "case", "check_case", "campaign", "Outcome"]

APPROX = 0.4


@dataclass(frozen=True)
class Bounds:
    concepts: int = 8
    roles: int = 4
    individuals: int = 6
    tbox: int = 12
    abox: int = 10
    atoms: int = 6
    answer_vars: int = 2
    concept_depth: int = 2
    role_inclusion: float = 0.2


def _names(b):
    return [chr(ord("A") + i) for i in range(b.concepts)]


def _roles(b):
    return ["r", "s", "t", "u"][:b.roles]


def _inds(b):
    return [chr(ord("a") + i) for i in range(b.individuals)]


def random_concept(rng: random.Random, names, roles, depth: int, bot=0.0):
    if depth <= 0 or rng.random() < 0.45:
        x = rng.random()
        if x < bot:
            return BOT
        if x < bot + 0.04:
            return TOP
        return Name(rng.choice(names))
    if rng.random() < APPROX:
        arg = random_concept(rng, names, roles, depth - 1)
        return Upper(arg) if rng.random() < 0.5 else Lower(arg)
    if rng.random() < 0.5:
        return And(random_concept(rng, names, roles, depth - 1),
                   random_concept(rng, names, roles, depth - 1))
    return Exists(rng.choice(roles), random_concept(rng, names, roles, depth - 1))


def random_tbox(rng: random.Random, b: Bounds = Bounds()) -> list:
    names = _names(b)[:rng.randint(2, b.concepts)]
    roles = _roles(b)[:rng.randint(1, b.roles)]
    out = []
    for _ in range(rng.randint(1, b.tbox)):
        lhs = random_concept(rng, names, roles, b.concept_depth)
        rhs = random_concept(rng, names, roles, b.concept_depth, bot=0.05)
        out.append(GCI(lhs, rhs))
    # acyclic role hierarchy, so no two roles are synonyms
    for i, r in enumerate(roles):
        for s in roles[i + 1:]:
            if rng.random() < b.role_inclusion:
                out.append(RI(r, s))
    return out


def random_kb(rng: random.Random, b: Bounds = Bounds()) -> KnowledgeBase:
    tbox = random_tbox(rng, b)
    names = _names(b)
    roles = _roles(b)
    inds = _inds(b)[:rng.randint(1, b.individuals)]
    abox = []
    for _ in range(rng.randint(1, b.abox)):
        x = rng.random()
        if x < 0.5:
            c = random_concept(rng, names, roles, 1)
            abox.append(ConceptAssertion(c, rng.choice(inds)))
        elif x < 0.8:
            abox.append(RoleAssertion(rng.choice(roles), rng.choice(inds),
                                      rng.choice(inds)))
        else:
            abox.append(IndiscAssertion(rng.choice(inds), rng.choice(inds)))
    return KnowledgeBase(tbox, abox)


def random_query(rng: random.Random, kb: KnowledgeBase,
                 b: Bounds = Bounds()) -> ConjunctiveQuery:
    names = sorted(kb.concept_names()) or ["A"]
    roles = sorted(kb.role_names()) or ["r"]
    inds = sorted(kb.individuals())
    nvars = rng.randint(1, 4)
    vs = [Var(f"x{i}") for i in range(nvars)]

    def term():
        if inds and rng.random() < 0.1:
            return Ind(rng.choice(inds))
        return rng.choice(vs)

    atoms = []
    for _ in range(rng.randint(1, b.atoms)):
        x = rng.random()
        if x < 0.35:
            atoms.append(ConceptAtom(random_concept(rng, names, roles, 1), term()))
        elif x < 0.8:
            atoms.append(RoleAtom(rng.choice(roles), term(), term()))
        else:
            atoms.append(RhoAtom(term(), term()))
    used = sorted({t for a in atoms for t in a.terms if isinstance(t, Var)})
    k = rng.randint(0, min(b.answer_vars, len(used)))
    return ConjunctiveQuery(tuple(rng.sample(used, k)), atoms)


def case(seed: int, i: int, b: Bounds = Bounds()):
    """The ``i``-th (kb, query) pair of campaign ``seed``."""
    rng = random.Random(f"{seed}:{i}")
    kb = random_kb(rng, b)
    return kb, random_query(rng, kb, b)


@dataclass
class Outcome:
    index: int
    status: str              # "ok", "inconsistent", "mismatch", "unstable"
    answer: list = field(default_factory=list)
    oracle: list = field(default_factory=list)
    oracle_deeper: list = field(default_factory=list)


def check_case(kb, q, index=0, stability=True) -> Outcome:
    from .evaluator import answer, prepare
    from .oracle import certain_answers_oracle, default_depth
    from .rewriter import unfold
    try:
        _, i_re = prepare(kb, q)
    except RoughELError:
        return Outcome(index, "inconsistent")
    got = answer(kb, q)
    d = default_depth(i_re, unfold(q))
    ref = certain_answers_oracle(kb, q, depth=d)
    out = Outcome(index, "ok", got, ref)
    if stability:
        out.oracle_deeper = certain_answers_oracle(kb, q, depth=d + 2)
        if out.oracle_deeper != ref:
            out.status = "unstable"
    if got != ref:
        out.status = "mismatch"
    return out


def _job(args):
    seed, i, stability = args
    kb, q = case(seed, i)
    return check_case(kb, q, i, stability)


def campaign(seed: int, cases: int, workers: int | None = None,
             stability=True) -> list:
    """Outcomes of cases ``0 .. cases-1``, in order."""
    jobs = [(seed, i, stability) for i in range(cases)]
    if workers == 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_job, jobs, chunksize=4))
