import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from roughel.canonical import materialize
from roughel.core import (
    BOT, GCI, RI, TOP, ConceptAssertion, ConceptRep, Exists, KnowledgeBase,
    Lower, LowerRep, Name, Named, RoughELError, Upper, UpperRep,
    eval_concept, model_check, subconcepts,
)
from roughel.fuzz import random_concept
from roughel.saturator import (
    BOT_NAME, TOP_NAME, entails_assertion, entails_role_inclusion,
    entails_subsumption, role_closure, role_synonyms, saturate,
)
from roughel.textio import parse_kb

from conftest import fuzz_kbs
from strategies import roles

A, B, C, D = (Name(n) for n in "ABCD")


def labels(sat, e):
    return sat.labels[e] - {TOP_NAME}


def test_running_example_labels(kex):
    sat = saturate(kex)
    a, xd = Named("a"), ConceptRep(D)
    assert {"A", "B"} <= labels(sat, a)
    assert "B" in labels(sat, LowerRep(a))
    assert {"A", "B"} <= labels(sat, UpperRep(C, xd))
    assert not sat.inconsistent


def test_trivial_kbs():
    sat = saturate(parse_kb("(assert A a)"))
    assert labels(sat, Named("a")) == {"A"} and not sat.inconsistent
    assert saturate(parse_kb("(subclass A bottom) (assert A a)")).inconsistent


def test_bottom_through_a_granule():
    kb = parse_kb("(subclass A (lower B)) (subclass B bottom)"
                  " (assert A a) (assert C b) (indisc a b)")
    assert saturate(kb).inconsistent


def test_unsatisfiable_concept_does_not_make_kb_inconsistent():
    kb = parse_kb("(subclass A (and B (some r E))) (subclass E bottom) (assert C a)")
    sat = saturate(kb)
    assert not sat.inconsistent
    assert BOT_NAME in sat.labels[ConceptRep(A)]
    assert entails_subsumption(sat, A, BOT)


def test_subsumption_examples(kex):
    sat = saturate(kex)
    assert entails_subsumption(sat, C, A)
    assert entails_subsumption(sat, C, Lower(B))
    assert entails_subsumption(sat, D, Upper(A))
    assert not entails_subsumption(sat, D, A)
    for c in [A, B, C, D, Upper(C), Exists("r", D)]:
        assert entails_subsumption(sat, c, TOP)


def test_assertion_examples(kex):
    sat = saturate(kex)
    assert entails_assertion(sat, Upper(D), "a")
    assert entails_assertion(sat, Lower(B), "a")
    assert entails_assertion(sat, Lower(B), "b")
    assert not entails_assertion(sat, A, "b")
    with pytest.raises(RoughELError):
        entails_assertion(sat, A, "zz")


def test_role_inclusion_examples():
    sat = saturate(KnowledgeBase([RI("r", "s"), RI("s", "t")]))
    assert entails_role_inclusion(sat, "r", "s")
    assert entails_role_inclusion(sat, "r", "t")
    assert entails_role_inclusion(sat, "q", "q")
    assert not entails_role_inclusion(sat, "t", "r")


def test_role_synonym_examples():
    assert role_synonyms([RI("r", "s"), RI("s", "r")]) == ("r", "s")
    assert role_synonyms([RI("r", "s")]) is None
    assert role_synonyms([RI("r", "s"), RI("s", "t"), RI("t", "r")]) is not None


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("pqrst"), st.sampled_from("pqrst")),
                max_size=6))
def test_role_synonyms_brute_force(pairs):
    ris = [RI(a, b) for a, b in pairs]
    names = sorted({x for p in pairs for x in p})
    # Warshall over the inclusion matrix
    le = {(x, y): x == y or (x, y) in pairs for x in names for y in names}
    for k, i, j in itertools.product(names, repeat=3):
        if le[i, k] and le[k, j]:
            le[i, j] = True
    expected = any(le[x, y] and le[y, x] for x in names for y in names if x != y)
    assert (role_synonyms(ris) is not None) == expected
    cl = role_closure(ris)
    for x in names:
        assert cl[x] == {y for y in names if le[x, y]}


def test_step_count_is_polynomial():
    for kb in fuzz_kbs(60, seed=5):
        sat = saturate(kb)
        universe = len(sat.labels)
        axioms = len(sat.ntbox.axioms) + len(sat.nkb.abox) + 1
        assert sat.steps <= universe * universe * axioms


def test_monotone_under_abox_extension():
    rng = random.Random(2)
    for kb in fuzz_kbs(60, seed=6):
        names = sorted(kb.concept_names()) or ["A"]
        extra = ConceptAssertion(Name(rng.choice(names)),
                                 rng.choice(sorted(kb.individuals())))
        small, big = saturate(kb), saturate(KnowledgeBase(kb.tbox, kb.abox | {extra}))
        for e, lab in small.labels.items():
            assert lab <= big.labels.get(e, lab | {"missing"})


def test_merged_seeds_share_lower_labels():
    for kb in fuzz_kbs(80, seed=7):
        sat = saturate(kb)
        for g in sat.granules:
            seeds = [e for e in g if isinstance(e, Named)]
            lows = {sat.labels[LowerRep(e)] for e in seeds}
            assert len(lows) <= 1


def _countermodel_ok(kb, c, d):
    """If c ⊑ d is not entailed, the canonical structure of kb plus a fresh
    c-instance is a model with a c-element outside d."""
    kb2 = KnowledgeBase(kb.tbox, kb.abox | {ConceptAssertion(c, "_w")})
    sat2 = saturate(kb2)
    if sat2.inconsistent:
        return None
    s = materialize(kb2, sat2, extra_concepts=["A", "B", "C", "D"])
    assert model_check(s, kb2)
    w = Named("_w")
    return w in eval_concept(s, d)


def test_subsumption_against_countermodels():
    rng = random.Random(8)
    checked = 0
    for kb in fuzz_kbs(120, seed=8):
        names = sorted(kb.concept_names()) or ["A"]
        roles = sorted(kb.role_names()) or ["r"]
        c = random_concept(rng, names, roles, 2)
        d = random_concept(rng, names, roles, 2)
        sat = saturate(kb)
        got = entails_subsumption(sat, c, d)
        holds = _countermodel_ok(kb, c, d)
        if holds is None:
            assert got, "c is unsatisfiable, so c ⊑ d must be entailed"
            continue
        if not got:
            assert not holds, (c, d)
        checked += 1
    assert checked > 50


def test_assertions_against_the_canonical_model():
    """entails_assertion(C, a) iff a ∈ C in I_K^re, which is a model."""
    for kb in fuzz_kbs(60, seed=9):
        sat = saturate(kb)
        s = materialize(kb, sat)
        assert model_check(s, kb)
        for c in sorted(subconcepts(kb), key=str):
            ext = eval_concept(s, c)
            for a in sorted(kb.individuals()):
                assert entails_assertion(sat, c, a) == (Named(a) in ext), (c, a)
