import pytest

from roughel.canonical import (
    Path, build_canonical, granule_of, materialize, paths, restrict_reachable,
    size_bound,
)
from roughel.core import (
    And, ConceptRep, KnowledgeBase, Lower, LowerRep, Name, Named,
    RoughELError, Upper, UpperRep, model_check,
)
from roughel.saturator import saturate
from roughel.textio import parse_kb

from conftest import fuzz_kbs

A, B, C, D = (Name(n) for n in "ABCD")
a, b = Named("a"), Named("b")
xD = ConceptRep(D)
la, lb, lxD = LowerRep(a), LowerRep(b), LowerRep(xD)
xDa, xCa, xCxD = UpperRep(D, a), UpperRep(C, a), UpperRep(C, xD)


def test_running_example_structure(kex):
    s = materialize(kex)
    assert s.domain == {a, b, xD, la, lb, lxD, xDa, xCa, xCxD}
    assert s.ext("A") == {a, xCa, xCxD}
    assert s.ext("B") == s.domain
    assert s.ext("C") == {a, xCa, xCxD}
    assert s.ext("D") == {xD, xDa}
    assert s.rel("r") == {(b, xD)}
    assert s.rho_seed == {(a, b), (a, la), (b, lb), (a, xDa), (xDa, xCa),
                          (xD, lxD), (xD, xCxD)}
    assert granule_of(s, a) == {a, b, la, lb, xDa, xCa}
    assert granule_of(s, xD) == {xD, lxD, xCxD}
    assert s.aux == {xD}
    assert s.aux_rho == {la, lb, lxD, xDa, xCa, xCxD}
    assert s.rho_ell == {(a, la), (b, lb), (xD, lxD)}
    assert model_check(s, kex)


def test_concept_in_empty_abox_is_unreachable(k2):
    full = build_canonical(k2)
    assert ConceptRep(C) in full.domain and ConceptRep(C) in full.ext("A")
    assert materialize(k2).domain == set()


def test_isolated_representative_dropped():
    kb = parse_kb("(subclass C A) (assert B a)")
    s = materialize(kb)
    assert ConceptRep(C) not in s.domain
    assert s.domain == {a, LowerRep(a)}


def test_empty_kb_gives_empty_structure():
    s = materialize(KnowledgeBase())
    assert s.domain == set() and s.rho_partition == ()


def test_minimal_granule():
    s = materialize(parse_kb("(assert A a)"))
    assert granule_of(s, a) == {a, la}


def test_granule_of_rejects_non_seeds(kex):
    s = materialize(kex)
    with pytest.raises(RoughELError):
        granule_of(s, la)
    with pytest.raises(RoughELError):
        granule_of(s, Named("zz"))


def test_inconsistent_kb_is_refused():
    with pytest.raises(RoughELError, match="inconsistent"):
        materialize(parse_kb("(subclass A bottom) (assert A a)"))


def test_granules_equal_partition_classes():
    for kb in fuzz_kbs(80, seed=1):
        s = materialize(kb)
        for e in s.domain:
            if isinstance(e, (Named, ConceptRep)):
                assert granule_of(s, e) == s.granule(e)


def test_size_bound_on_fuzz_corpus():
    for kb in fuzz_kbs(150, seed=2):
        assert len(build_canonical(kb).domain) <= size_bound(kb)


def test_models_of_their_knowledge_base():
    for kb in fuzz_kbs(150, seed=3):
        sat = saturate(kb)
        full = build_canonical(kb, sat)
        assert model_check(full, kb)
        assert model_check(restrict_reachable(full), kb)


def test_every_element_is_a_tail():
    checked = 0
    for kb in fuzz_kbs(80, seed=4):
        s = materialize(kb)
        if len(s.domain) > 8:
            continue
        tails = {p.tail for p in paths(s, len(s.domain))}
        assert tails == s.domain
        checked += 1
    assert checked >= 20


def test_path_basics():
    p = Path((a,)).extend("r", xD).extend("rho", lxD)
    assert p.tail == lxD and p.steps == 2
    assert str(p) == "a·r·x[D]·rho·l[x[D]]"


def test_running_example_paths(kex):
    s = materialize(kex)
    ps = set(paths(s, 2))
    assert Path((b, "r", xD, "rho", xCxD)) in ps
    assert Path((a, "rho", xDa, "rho", xCa)) in ps
    # named-to-named ρ edges do not start a path step
    assert not any(p.steps and isinstance(p[2], Named) for p in ps)
