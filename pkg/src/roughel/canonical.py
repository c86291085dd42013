"""
Canonical structures built from a saturated knowledge base.

``build_canonical`` lays out the full canonical interpretation: named
individuals, satisfiable concept representatives, their lower
representatives and the upper representatives activated during
saturation.  Role edges are the told edges closed under super-roles.
``restrict_reachable`` keeps the elements reachable from named
individuals along role edges and directed ρ seed edges.
"""

from __future__ import annotations

from collections import deque

from scipy.cluster.hierarchy import DisjointSet

from .core import (
    ConceptRep, FiniteStructure, KnowledgeBase, LowerRep, Named,
    RoughELError, UpperRep, is_seed, make_structure,
)
from .saturator import BOT_NAME, SaturatedKB, saturate

__all__ = ["build_canonical", "restrict_reachable", "materialize",
           "granule_of", "Path", "paths", "RHO_STEP", "size_bound"]

RHO_STEP = "rho"


def build_canonical(kb: KnowledgeBase, sat: SaturatedKB | None = None,
                    extra_concepts=(), extra_roles=()) -> FiniteStructure:
    if sat is None:
        sat = saturate(kb)
    if sat.inconsistent:
        raise RoughELError("knowledge base is inconsistent")
    dom = {e for e, lab in sat.labels.items() if BOT_NAME not in lab}
    concepts = sorted(kb.concept_names() | set(extra_concepts))
    roles = sorted(kb.role_names() | set(extra_roles))
    cext = {a: {e for e in dom if a in sat.labels[e]} for a in concepts}
    rext = {r: set() for r in roles}
    for u, r, v in sat.edges:
        if u in dom and v in dom:
            for s in sat.role_closure.get(r, (r,)):
                if s in rext:
                    rext[s].add((u, v))
    ell = {(e, LowerRep(e)) for e in dom if is_seed(e) and LowerRep(e) in dom}
    return make_structure(
        dom, cext, rext, sat.rho_edges, ell,
        aux={e for e in dom if isinstance(e, ConceptRep)},
        aux_rho={e for e in dom if isinstance(e, (UpperRep, LowerRep))},
        concepts=concepts, roles=roles,
    )


def _successors(s: FiniteStructure):
    nxt = {e: set() for e in s.domain}
    for ext in s.role_ext.values():
        for x, y in ext:
            nxt[x].add(y)
    for x, y in s.rho_seed:
        nxt[x].add(y)
    return nxt


def restrict_reachable(s: FiniteStructure) -> FiniteStructure:
    """Keep named elements and the tails of paths starting at them."""
    nxt = _successors(s)
    seen = {e for e in s.domain if isinstance(e, Named)}
    todo = deque(seen)
    while todo:
        for y in nxt[todo.popleft()]:
            if y not in seen and not isinstance(y, Named):
                seen.add(y)
                todo.append(y)
    return make_structure(seen, s.concept_ext, s.role_ext, s.rho_seed,
                          s.rho_ell, s.aux, s.aux_rho, s.concepts, s.roles)


def materialize(kb: KnowledgeBase, sat: SaturatedKB | None = None,
                **kw) -> FiniteStructure:
    return restrict_reachable(build_canonical(kb, sat, **kw))


def granule_of(s: FiniteStructure, e) -> frozenset:
    """The granule of a reachable seed, assembled from its own lower and
    upper representatives and those of ABox-indiscernible individuals."""
    if not is_seed(e) or e not in s.domain:
        raise RoughELError(f"{e} is not a seed element of the structure")
    seeds = {e}
    if isinstance(e, Named):
        named = sorted((x for x in s.domain if isinstance(x, Named)), key=str)
        ds = DisjointSet(named)
        for x, y in s.rho_seed:
            if isinstance(x, Named) and isinstance(y, Named):
                ds.merge(x, y)
        seeds = set(ds.subset(e))
    out = set(seeds)
    for x in s.domain:
        if isinstance(x, (UpperRep, LowerRep)) and x.seed in seeds:
            out.add(x)
    return frozenset(out)


def size_bound(kb: KnowledgeBase) -> int:
    """(1 + |C(K)|)(|N_I| + |C(K)|) + |N_I| + |C(K)|."""
    from .core import subconcepts
    c, n = len(subconcepts(kb)), len(kb.individuals())
    return (1 + c) * (n + c) + n + c


class Path(tuple):
    """d0 r1 d1 ... rn dn, stored flat; roles are strings and ρ seed
    steps use ``RHO_STEP``."""

    @property
    def tail(self):
        return self[-1]

    @property
    def steps(self) -> int:
        return len(self) // 2

    def extend(self, step, e) -> "Path":
        return Path(self + (step, e))

    def __str__(self):
        return "·".join(str(x) for x in self)

    def __repr__(self):
        return f"Path({self})"


def paths(s: FiniteStructure, max_steps: int):
    """All paths of ``s`` with at most ``max_steps`` steps."""
    out_edges = {e: [] for e in s.domain}
    for r in sorted(s.role_ext):
        for x, y in s.role_ext[r]:
            if not isinstance(y, Named):
                out_edges[x].append((r, y))
    for x, y in s.rho_seed:
        if not isinstance(y, Named):
            out_edges[x].append((RHO_STEP, y))
    frontier = [Path((e,)) for e in s.domain if isinstance(e, Named)]
    for k in range(max_steps + 1):
        yield from frontier
        if k == max_steps:
            break
        frontier = [p.extend(st, y) for p in frontier
                    for st, y in out_edges[p.tail]]
