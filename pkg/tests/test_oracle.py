import pytest

from roughel.canonical import RHO_STEP
from roughel.core import ConceptRep, LowerRep, Name, Named
from roughel.evaluator import answer, prepare
from roughel.oracle import (
    DEPTH_ENV, certain_answers_oracle, default_depth, interior_violations, unravel,
)
from roughel.rewriter import unfold
from roughel.textio import parse_query

from conftest import PHI3, PHI3_UP, fuzz_kbs

CHAIN_Q = "(query (x) (exists (y z) (role r x y) (role r y z)))"
RHO_A = "(query (x) (exists (y) (rho x y) (atom A y)))"


def _tu(kb, depth):
    sat, s = prepare(kb)
    return s, unravel(s, depth, sat.role_closure)


def test_k3_successors_are_split(k3):
    _, tu = _tu(k3, 2)
    u = tu.structure
    r_succ = {y for x, y in u.rel("r") if x.steps == 0}
    s_succ = {y for x, y in u.rel("s") if x.steps == 0}
    assert len(r_succ) == len(s_succ) == 1
    assert r_succ.isdisjoint(s_succ)
    (p,) = r_succ
    (q,) = s_succ
    assert p.tail == q.tail == ConceptRep(Name("B"))


def test_depth_zero_is_the_named_part(kex):
    s, tu = _tu(kex, 0)
    u = tu.structure
    assert {p.tail for p in u.domain} == {e for e in s.domain if isinstance(e, Named)}
    for c in s.concepts:
        assert {p.tail for p in u.ext(c)} == {e for e in s.ext(c) if isinstance(e, Named)}
    assert tu.frontier == u.domain


def _small_unravelings(n=40, depth=4):
    for kb in fuzz_kbs(n, seed=21):
        s, tu = _tu(kb, depth)
        if len(tu.structure.domain) <= 3000:
            yield kb, s, tu


def test_lower_paths_hang_off_their_seed():
    seen = 0
    for _, _, tu in _small_unravelings():
        for p in tu.structure.domain:
            if isinstance(p.tail, LowerRep):
                seen += 1
                assert p[-2] == RHO_STEP and p[-3] == p.tail.seed
    assert seen


def test_rho_classes_of_anonymous_elements():
    for _, s, tu in _small_unravelings():
        u = tu.structure
        for g in u.rho_partition:
            if any(p.steps == 0 for p in g):
                continue
            root = min(g, key=lambda p: p.steps)
            assert isinstance(root.tail, ConceptRep) and root[-2] != RHO_STEP
            for p in g:
                assert p[:len(root)] == root
                assert all(p[i] == RHO_STEP for i in range(len(root), len(p), 2))


def test_rho_is_coherent_with_tails():
    for _, s, tu in _small_unravelings():
        for g in tu.structure.rho_partition:
            tails = [p.tail for p in g]
            assert all(s.rho(tails[0], t) for t in tails)


def test_interior_is_a_model():
    checked = 0
    for kb, _, tu in _small_unravelings(n=30, depth=5):
        assert interior_violations(tu, kb) == []
        checked += 1
    assert checked >= 10


def test_oracle_examples(kex, k3, chain):
    assert certain_answers_oracle(kex, parse_query(RHO_A)) == [("a",), ("b",)]
    assert certain_answers_oracle(k3, parse_query(PHI3)) == []
    assert certain_answers_oracle(k3, parse_query(PHI3_UP)) == []
    assert certain_answers_oracle(chain, parse_query(CHAIN_Q)) == [("a",)]


def test_depth_counts_role_steps(chain):
    q = parse_query(CHAIN_Q)
    assert certain_answers_oracle(chain, q, depth=1) == []
    assert certain_answers_oracle(chain, q, depth=2) == [("a",)]


def test_depth_from_environment(chain, monkeypatch):
    q = parse_query(CHAIN_Q)
    monkeypatch.setenv(DEPTH_ENV, "1")
    assert certain_answers_oracle(chain, q) == []
    monkeypatch.setenv(DEPTH_ENV, "3")
    assert certain_answers_oracle(chain, q) == [("a",)]


def test_default_depth(chain):
    q = parse_query(CHAIN_Q)
    _, s = prepare(chain, q)
    assert default_depth(s, unfold(q)) == len(s.domain) + 2 + 2


def test_oracle_and_answer_agree_on_small_kbs():
    import random
    from roughel.fuzz import random_query
    rng = random.Random(5)
    for kb in fuzz_kbs(60, seed=8):
        q = random_query(rng, kb)
        _, s = prepare(kb, q)
        d = default_depth(s, unfold(q))
        ref = certain_answers_oracle(kb, q, depth=d)
        assert certain_answers_oracle(kb, q, depth=d + 2) == ref
        assert answer(kb, q) == ref
