"""Upper and lower approximations on a tiny ABox.

a and b are indiscernible and only a is known to be in A.  Both land in
the upper approximation of A.  Neither lands in the lower one, not even
after A(b) is added: the granule of a and b may hold further, unnamed
members outside A.  Asserting Lower(A) for one of them settles it for
the whole granule.

    python3 demos/approximations.py
"""

from roughel import answer, parse_kb, parse_query

BASE = """
(subclass (lower A) Safe)
(assert A a)
(indisc a b)
(assert Other c)
"""

queries = {
    "upper A": "(query (x) (atom (upper A) x))",
    "lower A": "(query (x) (atom (lower A) x))",
    "Safe": "(query (x) (atom Safe x))",
    "rho-mate in A": "(query (x) (exists (y) (rho x y) (atom A y)))",
}

steps = [
    ("A(a)", ""),
    ("A(a), A(b)", "(assert A b)"),
    ("A(a), Lower(A)(b)", "(assert (lower A) b)"),
]

for title, extra in steps:
    kb = parse_kb(BASE + extra)
    print(f"== {title}")
    for name, text in queries.items():
        rows = answer(kb, parse_query(text))
        print(f"  {name:14} {' '.join(t[0] for t in rows) or '-'}")
