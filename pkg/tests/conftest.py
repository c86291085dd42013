import random
from pathlib import Path

import pytest

from roughel.textio import parse_kb, parse_query

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

KEX = """
(subclass D (upper C))
(subclass C (and A (lower B)))
(assert C a)
(assert (upper D) a)
(assert (some r D) b)
(indisc a b)
"""

K2 = "(subclass C A)"
K3 = "(subclass A (and (some r B) (some s B)))\n(assert A a)"
CHAIN = "(subclass A (some r A))\n(assert A a)"

PHI2 = "(query () (exists (y) (atom A y)))"
PHI3 = "(query (x) (exists (y) (role r x y) (role s x y)))"
PHI3_UP = "(query (x) (exists (y) (role r x y) (role s x y) (atom (upper B) y)))"
PHI4 = "(query () (exists (y1 y2) (role hasA y1 y2) (rho y1 y2)))"
PHI5 = ("(query (x1 x2) (exists (y1 y2) (role hasA x1 y1) (role hasA x2 y2)"
        " (rho y1 y2)))")


@pytest.fixture
def kex():
    return parse_kb(KEX)


@pytest.fixture
def k2():
    return parse_kb(K2)


@pytest.fixture
def k3():
    return parse_kb(K3)


@pytest.fixture
def chain():
    return parse_kb(CHAIN)


def regression_corpus():
    """(name, kb, query) for every consistent demo KB and every demo query
    whose individuals it knows."""
    from roughel.saturator import saturate
    kbs = {p.name: parse_kb(p.read_text()) for p in sorted(DATA.glob("*.rkb"))}
    qs = {p.name: parse_query(p.read_text()) for p in sorted(DATA.glob("*.rcq"))}
    out = []
    for kn, kb in kbs.items():
        if saturate(kb).inconsistent:
            continue
        for qn, query in qs.items():
            if query.individuals() <= kb.individuals():
                out.append((f"{kn}:{qn}", kb, query))
    return out


def fuzz_kbs(n, seed=0, consistent=True):
    """``n`` random KBs from the fuzz generator, consistent ones only by
    default."""
    from roughel.fuzz import random_kb
    from roughel.saturator import saturate
    out, i = [], 0
    while len(out) < n:
        kb = random_kb(random.Random(f"kb{seed}:{i}"))
        i += 1
        if consistent and saturate(kb).inconsistent:
            continue
        out.append(kb)
    return out


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
