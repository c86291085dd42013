"""
Reference semantics by unraveling.

The unraveling of the reachable canonical structure has as elements the
paths ``a s1 d1 ... sn dn`` starting at a named individual, where each
step is a role edge or a directed ρ seed edge.  It is generally
infinite, so two executable views are offered:

``unravel``
    the explicit truncation to paths of at most ``depth`` steps; only
    usable on small inputs, it exists for inspecting shapes.

``certain_answers_oracle``
    a brute-force homomorphism search over a lazily generated copy of
    the unraveling in which every ρ class is one *instance*: instances
    are created on demand, one per role edge leaving a member of the
    parent instance, up to ``depth`` role steps below the named part.
"""

from __future__ import annotations

import os
from collections import defaultdict, deque
from dataclasses import dataclass

from .canonical import RHO_STEP, Path, materialize, paths
from .core import (
    GCI, And, Bot, ConceptAtom, ConceptRep, ConjunctiveQuery, Exists,
    FiniteStructure, Ind, KnowledgeBase, Lower, LowerRep, Named, RhoAtom,
    RoleAtom, RoughELError, Top, Upper, UpperRep, concept_names,
    concept_roles, eval_concept, is_seed, make_structure, violations,
)
from .normalizer import normalize_kb
from .rewriter import unfold
from .saturator import saturate

__all__ = ["TruncatedUnraveling", "unravel", "interior_violations",
           "certain_answers_oracle", "default_depth", "DEPTH_ENV"]

DEPTH_ENV = "ROUGHEL_DEPTH"


# -- explicit truncation ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedUnraveling:
    structure: FiniteStructure
    depth: int

    @property
    def frontier(self) -> frozenset:
        return frozenset(p for p in self.structure.domain if p.steps == self.depth)


def unravel(i_re: FiniteStructure, depth: int, role_closure=None) -> TruncatedUnraveling:
    """All paths of ``i_re`` with at most ``depth`` steps.

    ``role_closure`` maps a role to its super-roles; a path step along
    ``s`` is an edge of every super-role of ``s``.  Without it only the
    step role itself is used.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    sup = role_closure or {}
    dom = list(paths(i_re, depth))
    dset = set(dom)

    cext = {c: {p for p in dom if p.tail in i_re.ext(c)} for c in i_re.concepts}
    rext = {r: set() for r in i_re.roles}
    seed, ell = set(), set()
    for r, pairs in i_re.role_ext.items():
        for x, y in pairs:
            if isinstance(x, Named) and isinstance(y, Named):
                rext[r].add((Path((x,)), Path((y,))))
    for p in dom:
        if p.steps == 0:
            continue
        q, step = Path(p[:-2]), p[-2]
        if step == RHO_STEP:
            seed.add((q, p))
            if isinstance(p.tail, LowerRep) and p.tail.seed == q.tail:
                ell.add((q, p))
        else:
            for r in sup.get(step, (step,)):
                rext.setdefault(r, set()).add((q, p))
    for x, y in i_re.rho_seed:
        if isinstance(x, Named) and isinstance(y, Named):
            seed.add((Path((x,)), Path((y,))))
    s = make_structure(
        dset, cext, rext, seed, ell,
        aux={p for p in dom if isinstance(p.tail, ConceptRep)},
        aux_rho={p for p in dom if isinstance(p.tail, (UpperRep, LowerRep))},
        concepts=i_re.concepts, roles=sorted(rext),
    )
    return TruncatedUnraveling(s, depth)


def _nesting(c) -> int:
    if isinstance(c, And):
        return max(_nesting(c.left), _nesting(c.right))
    if isinstance(c, Exists):
        return 1 + _nesting(c.filler)
    if isinstance(c, (Upper, Lower)):
        return 1 + _nesting(c.arg)
    return 0


def interior_violations(tu: TruncatedUnraveling, kb: KnowledgeBase) -> list:
    """Axioms of ``kb`` violated at elements far enough from the frontier
    that every witness the axiom can ask for lies inside the truncation."""
    s = tu.structure
    runs = {}
    for p in s.domain:
        k = 0
        while k < p.steps and p[-2 - 2 * k] == RHO_STEP:
            k += 1
        runs[p] = k
    chain = 1 + max(runs.values(), default=0)
    bad = []
    for ax in kb.tbox:
        if not isinstance(ax, GCI):
            continue
        m = (max(_nesting(ax.lhs), _nesting(ax.rhs)) + 1) * chain
        inner = {p for p in s.domain if p.steps + m <= tu.depth}
        if not (eval_concept(s, ax.lhs) & inner) <= eval_concept(s, ax.rhs):
            bad.append(ax)
    rest = KnowledgeBase([ax for ax in kb.tbox if not isinstance(ax, GCI)], kb.abox)
    return bad + violations(_named_view(s), rest)


def _named_view(s):
    """Rename one-element paths to their named element for assertion checks."""
    ren = {p: (p.tail if p.steps == 0 else p) for p in s.domain}
    m = lambda xs: {ren[x] for x in xs}
    m2 = lambda xs: {(ren[x], ren[y]) for x, y in xs}
    return make_structure(
        m(s.domain), {c: m(v) for c, v in s.concept_ext.items()},
        {r: m2(v) for r, v in s.role_ext.items()}, m2(s.rho_seed),
        m2(s.rho_ell), m(s.aux), m(s.aux_rho), s.concepts, s.roles)


# -- lazy collapsed search ----------------------------------------------------

class _Inst:
    __slots__ = ("id", "root", "depth", "parent", "members")

    def __init__(self, id, root, depth, parent, members):
        self.id, self.root, self.depth = id, root, depth
        self.parent, self.members = parent, members


class _Space:
    """Elements are pairs ``(instance id, element of i_re)``."""

    def __init__(self, i_re: FiniteStructure, edges, sup, depth: int):
        self.s = i_re
        self.sup = sup
        self.depth = depth
        self.out = defaultdict(list)          # d -> [(told role, x)]
        self.into_named = defaultdict(list)   # b -> [(told role, a)]
        for u, r, v in edges:
            if u in i_re.domain and v in i_re.domain:
                self.out[u].append((r, v))
                if isinstance(v, Named):
                    self.into_named[v].append((r, u))
        for d in self.out:
            self.out[d].sort(key=lambda rv: (rv[0], str(rv[1])))
        self.insts = []
        self.child = {}
        self.named_inst = {}
        for g in sorted(i_re.rho_partition, key=lambda g: sorted(map(str, g))):
            named = [e for e in g if isinstance(e, Named)]
            if named:
                inst = self._new(None, 0, None, g)
                for e in named:
                    self.named_inst[e] = inst

    def _new(self, root, depth, parent, members):
        inst = _Inst(len(self.insts), root, depth, parent, members)
        self.insts.append(inst)
        return inst

    def child_of(self, inst, d, r, x):
        key = (inst.id, d, r, x)
        c = self.child.get(key)
        if c is None and inst.depth < self.depth:
            c = self._new(x, inst.depth + 1, (inst, d, r),
                          self.s.granule(x))
            self.child[key] = c
        return c

    # relations -----------------------------------------------------------

    def succ(self, el, role):
        i, d = el
        inst = self.insts[i]
        for r, x in self.out.get(d, ()):
            if role not in self.sup.get(r, (r,)):
                continue
            if isinstance(x, Named):
                yield (self.named_inst[x].id, x)
            else:
                c = self.child_of(inst, d, r, x)
                if c is not None:
                    yield (c.id, x)

    def pred(self, el, role):
        i, e = el
        inst = self.insts[i]
        if isinstance(e, Named):
            for r, a in self.into_named.get(e, ()):
                if role in self.sup.get(r, (r,)):
                    yield (self.named_inst[a].id, a)
        elif inst.parent is not None and e == inst.root:
            p, d, r = inst.parent
            if role in self.sup.get(r, (r,)):
                yield (p.id, d)

    def same_granule(self, el):
        i, _ = el
        for m in self.insts[i].members:
            yield (i, m)

    def ell(self, el):
        i, e = el
        if is_seed(e) and LowerRep(e) in self.insts[i].members:
            yield (i, LowerRep(e))

    def ell_inv(self, el):
        i, e = el
        if isinstance(e, LowerRep) and e.seed in self.insts[i].members:
            yield (i, e.seed)

    def has_concept(self, el, c):
        if isinstance(c, Top):
            return True
        if isinstance(c, Bot):
            return False
        return el[1] in self.s.ext(c.name)

    def holds(self, a, val):
        if isinstance(a, ConceptAtom):
            return self.has_concept(val(a.term), a.concept)
        x, y = val(a.s), val(a.t)
        if isinstance(a, RoleAtom):
            return y in set(self.succ(x, a.role))
        if isinstance(a, RhoAtom):
            return x[0] == y[0]
        return y in set(self.ell(x))

    # anchors ---------------------------------------------------------------

    def named_elements(self):
        out = []
        for inst in {id(v): v for v in self.named_inst.values()}.values():
            out += [(inst.id, m) for m in sorted(inst.members, key=str)]
        return out

    def shallowest(self):
        """One instance per reachable concept representative, at the least
        depth at which it occurs."""
        seen = {}
        todo = deque({id(v): v for v in self.named_inst.values()}.values())
        while todo:
            inst = todo.popleft()
            for d in sorted(inst.members, key=str):
                for r, x in self.out.get(d, ()):
                    if isinstance(x, Named) or x in seen:
                        continue
                    c = self.child_of(inst, d, r, x)
                    if c is not None:
                        seen[x] = c
                        todo.append(c)
        return [seen[x] for x in sorted(seen, key=str)]


def _components(atoms):
    terms = sorted({t for a in atoms for t in a.terms}, key=str)
    parent = {t: t for t in terms}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for a in atoms:
        ts = a.terms
        for t in ts[1:]:
            parent[find(t)] = find(ts[0])
    groups = defaultdict(list)
    for a in atoms:
        groups[find(a.terms[0])].append(a)
    return list(groups.values())


def _order(atoms, anchor):
    """Terms in breadth-first order from ``anchor`` over the atoms."""
    adj = defaultdict(set)
    for a in atoms:
        for t in a.terms:
            adj[t] |= set(a.terms)
    order, seen, todo = [], {anchor}, deque([anchor])
    while todo:
        t = todo.popleft()
        order.append(t)
        for u in sorted(adj[t] - seen, key=str):
            seen.add(u)
            todo.append(u)
    return order


def _candidates(sp, t, atoms, env):
    """Elements for ``t`` generated by some atom linking it to a bound term."""
    for a in atoms:
        if isinstance(a, ConceptAtom):
            continue
        x, y = a.s, a.t
        if y == t and x in env and x != t:
            o = env[x]
            if isinstance(a, RoleAtom):
                return list(sp.succ(o, a.role))
            if isinstance(a, RhoAtom):
                return list(sp.same_granule(o))
            return list(sp.ell(o))
        if x == t and y in env and y != t:
            o = env[y]
            if isinstance(a, RoleAtom):
                return list(sp.pred(o, a.role))
            if isinstance(a, RhoAtom):
                return list(sp.same_granule(o))
            return list(sp.ell_inv(o))
    raise AssertionError("disconnected term")


def _matches(sp, atoms, anchor, start, want):
    """Projections onto ``want`` of matches of ``atoms`` with
    ``anchor`` sent to ``start``."""
    order = _order(atoms, anchor)
    touching = defaultdict(list)
    for a in atoms:
        for t in set(a.terms):
            touching[t].append(a)
    env = {}
    out = set()
    val = env.__getitem__

    def ok(t):
        e = env[t]
        if isinstance(t, Ind) and e != (sp.named_inst[Named(t.name)].id, Named(t.name)):
            return False
        return all(sp.holds(a, val) for a in touching[t]
                   if all(u in env for u in a.terms))

    def go(k):
        if k == len(order):
            out.add(tuple(env[v] for v in want))
            return not want
        t = order[k]
        for e in _candidates(sp, t, touching[t], env):
            env[t] = e
            if ok(t) and go(k + 1):
                return True
            del env[t]
        return False

    env[anchor] = start
    if ok(anchor):
        go(1)
    return out


def default_depth(i_re: FiniteStructure, unfolded: ConjunctiveQuery) -> int:
    return len(i_re.domain) + len(unfolded.atoms) + 2


def _resolve_depth(depth, i_re, unfolded):
    if depth is not None:
        return depth
    env = os.environ.get(DEPTH_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise RoughELError(f"{DEPTH_ENV} must be an integer, got {env!r}")
    return default_depth(i_re, unfolded)


def _prepare(kb, q):
    cs, rs = set(), set()
    for a in q.atoms:
        if isinstance(a, ConceptAtom):
            cs |= concept_names(a.concept)
            rs |= concept_roles(a.concept)
        elif isinstance(a, RoleAtom):
            rs.add(a.role)
    unknown = q.individuals() - kb.individuals()
    if unknown:
        raise RoughELError(f"unknown individual(s) in query: {', '.join(sorted(unknown))}")
    sat = saturate(kb, normalize_kb(kb))
    if sat.inconsistent:
        raise RoughELError("knowledge base is inconsistent")
    i_re = materialize(kb, sat, extra_concepts=cs, extra_roles=rs)
    sup = dict(sat.role_closure)
    for r in rs | set(i_re.roles):
        sup.setdefault(r, frozenset({r}))
    return sat, i_re, sup


def certain_answers_oracle(kb: KnowledgeBase, q: ConjunctiveQuery,
                           depth: int | None = None) -> list:
    """Certain answers of ``q`` by homomorphism search over the
    unraveling, truncated ``depth`` role steps below the named part.

    Without ``depth`` the value of the ``ROUGHEL_DEPTH`` environment
    variable is used, else ``default_depth``.
    """
    sat, i_re, sup = _prepare(kb, q)
    uq = unfold(q)
    sp = _Space(i_re, sat.edges, sup, _resolve_depth(depth, i_re, uq))
    named = sp.named_elements()
    pool = None
    answers = [{}]
    ans = list(q.answer_vars)
    for comp in sorted(_components(list(uq.atoms)), key=lambda c: sorted(map(str, c))):
        terms = {t for a in comp for t in a.terms}
        want = [v for v in ans if v in terms]
        inds = sorted((t for t in terms if isinstance(t, Ind)), key=str)
        if inds:
            a = inds[0]
            if Named(a.name) not in sp.named_inst:
                return []
            starts = [(inds[0], (sp.named_inst[Named(a.name)].id, Named(a.name)))]
        elif want:
            starts = [(want[0], e) for e in named if isinstance(e[1], Named)]
        else:
            if pool is None:
                pool = named + [(inst.id, m) for inst in sp.shallowest()
                                for m in sorted(inst.members, key=str)]
            starts = [(t, e) for t in sorted(terms, key=str) for e in pool]
        found = set()
        for anchor, e in starts:
            found |= _matches(sp, comp, anchor, e, want)
            if found and not want:
                break
        found = {tup for tup in found if all(isinstance(e[1], Named) for e in tup)}
        if not found:
            return []
        part = [dict(zip(want, (e[1].ind for e in tup))) for tup in found]
        answers = [{**a, **p} for a in answers for p in part]
    return sorted({tuple(a[v] for v in ans) for a in answers})
