"""Textbook semantics over explicit pair sets, kept separate from the
library's partition-based evaluation so the two can be compared."""

from roughel.core import And, Bot, Exists, Lower, Name, Top, Upper


def rho_pairs(dom, seed):
    rel = {(x, x) for x in dom}
    rel |= {(x, y) for x, y in seed if x in dom and y in dom}
    rel |= {(y, x) for x, y in rel}
    while True:
        extra = {(x, z) for x, y in rel for y2, z in rel if y == y2} - rel
        if not extra:
            return rel
        rel |= extra


def ext(s, c, rho=None):
    dom = set(s.domain)
    if rho is None:
        rho = rho_pairs(dom, s.rho_seed)
    if isinstance(c, Top):
        return dom
    if isinstance(c, Bot):
        return set()
    if isinstance(c, Name):
        return set(s.concept_ext.get(c.name, ()))
    if isinstance(c, And):
        return ext(s, c.left, rho) & ext(s, c.right, rho)
    if isinstance(c, Exists):
        f = ext(s, c.filler, rho)
        return {x for x, y in s.role_ext.get(c.role, ()) if y in f}
    f = ext(s, c.arg, rho)
    if isinstance(c, Upper):
        return {x for x in dom if any((x, y) in rho for y in f)}
    if isinstance(c, Lower):
        return {x for x in dom if all(y in f for y in dom if (x, y) in rho)}
    raise TypeError(c)
