"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from roughel.core import (
    BOT, GCI, RI, TOP, And, ConceptAssertion, ConceptAtom, ConjunctiveQuery,
    Exists, Ind, IndiscAssertion, KnowledgeBase, Lower, Name, Named,
    RhoAtom, RoleAssertion, RoleAtom, Upper, Var, make_structure,
)

NAMES = ["A", "B", "C", "D"]
ROLES = ["r", "s"]
INDS = ["a", "b", "c"]

names = st.sampled_from(NAMES)
roles = st.sampled_from(ROLES)
inds = st.sampled_from(INDS)

concepts = st.recursive(
    st.one_of(names.map(Name), st.just(TOP), st.just(BOT)),
    lambda sub: st.one_of(
        st.builds(And, sub, sub),
        st.builds(Exists, roles, sub),
        st.builds(Upper, sub),
        st.builds(Lower, sub),
    ),
    max_leaves=5,
)

axioms = st.one_of(st.builds(GCI, concepts, concepts),
                   st.builds(RI, roles, roles))
assertions = st.one_of(
    st.builds(ConceptAssertion, concepts, inds),
    st.builds(RoleAssertion, roles, inds, inds),
    st.builds(IndiscAssertion, inds, inds),
)
kbs = st.builds(KnowledgeBase, st.lists(axioms, max_size=5),
                st.lists(assertions, max_size=5))

terms = st.one_of(st.sampled_from(["x", "y", "z"]).map(Var), inds.map(Ind))


@st.composite
def queries(draw):
    atoms = draw(st.lists(st.one_of(
        st.builds(ConceptAtom, concepts, terms),
        st.builds(RoleAtom, roles, terms, terms),
        st.builds(RhoAtom, terms, terms)), min_size=1, max_size=5))
    vs = sorted({t for a in atoms for t in a.terms if isinstance(t, Var)})
    ans = draw(st.lists(st.sampled_from(vs), unique=True, max_size=2)) if vs else []
    return ConjunctiveQuery(tuple(ans), atoms)


@st.composite
def structures(draw, max_size=5):
    n = draw(st.integers(0, max_size))
    dom = [Named(f"e{i}") for i in range(n)]
    if not dom:
        return make_structure([], concepts=NAMES, roles=ROLES)
    el = st.sampled_from(dom)
    pair = st.tuples(el, el)
    cext = {c: draw(st.sets(el)) for c in NAMES}
    rext = {r: draw(st.sets(pair, max_size=6)) for r in ROLES}
    seed = draw(st.sets(pair, max_size=4))
    return make_structure(dom, cext, rext, seed, concepts=NAMES, roles=ROLES)
