"""
S-expression text formats.

=====  ==========================================================
.rkb   knowledge base: subclass, subrole, assert, assert-role, indisc
.rcq   conjunctive query: (query (answer vars) atoms...)
.rfs   finite structure, one fact per line, sorted
.rfo   rewritten query: (foquery (answer vars) (exists (vars) ...))
=====  ==========================================================

Every serializer is deterministic and every parser accepts what the
matching serializer writes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    BOT, TOP, And, Bot, ConceptAssertion, ConceptAtom, ConceptRep,
    ConjunctiveQuery, Exists, GCI, IndiscAssertion, Ind, KnowledgeBase,
    Lower, LowerRep, Name, Named, QueryError, RhoAtom, RhoEllAtom, RI,
    RoleAssertion, RoleAtom, Top, Upper, UpperRep, Var, conj,
    make_structure, render_concept,
)

__all__ = [
    "SourceSpan", "ParseError", "parse_kb", "serialize_kb",
    "parse_concept", "parse_query", "serialize_query",
    "parse_structure", "serialize_structure", "render_element",
    "parse_element", "parse_foquery", "serialize_foquery", "RESERVED",
]

RESERVED = frozenset("""
    subclass subrole and some upper lower assert assert-role indisc query
    exists atom role rho top bottom ind some-atoms foquery not-aux
    not-aux-rho implies eq or aux aux_rho rho_ell rho-ell
""".split())

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, msg, span: SourceSpan | None = None, expected=()):
        self.span = span
        self.expected = tuple(expected)
        where = f"{span}: " if span else ""
        tail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(where + msg + tail)


# -- tokenizer and reader -----------------------------------------------------

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


class _Atom(str):
    span: SourceSpan


class _List(list):
    span: SourceSpan


def _span(text, start, end):
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, col)


def _read_all(text: str) -> list:
    stack = [_List()]
    opens = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok[0].isspace() or tok[0] == ";":
            continue
        if tok == "(":
            lst = _List()
            lst.span = _span(text, m.start(), m.start() + 1)
            stack[-1].append(lst)
            stack.append(lst)
            opens.append(m.start())
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", _span(text, m.start(), m.end()))
            stack.pop()
            opens.pop()
        else:
            a = _Atom(tok)
            a.span = _span(text, m.start(), m.end())
            stack[-1].append(a)
    if opens:
        raise ParseError("unclosed '('", _span(text, opens[-1], opens[-1] + 1),
                         expected=(")",))
    return stack[0]


def _where(x):
    return getattr(x, "span", None)


def _ident(x, what="identifier"):
    if not isinstance(x, str):
        raise ParseError(f"expected {what}, got a list", _where(x), (what,))
    if x in RESERVED:
        if x == "rho":
            raise ParseError("'rho' is reserved for the indiscernibility "
                             "relation", _where(x))
        raise ParseError(f"'{x}' is a reserved word", _where(x), (what,))
    if not _IDENT.match(x):
        raise ParseError(f"bad identifier '{x}'", _where(x), (what,))
    return str(x)


def _head(x, *allowed):
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise ParseError("expected a form", _where(x), allowed)
    if allowed and x[0] not in allowed:
        raise ParseError(f"unexpected '{x[0]}'", _where(x[0]), allowed)
    return str(x[0])


def _arity(x, n):
    if len(x) != n:
        raise ParseError(f"'{x[0]}' takes {n - 1} argument(s), got {len(x) - 1}",
                         _where(x))


# -- concepts -----------------------------------------------------------------

def _concept(x):
    if isinstance(x, str):
        if x == "top":
            return TOP
        if x == "bottom":
            return BOT
        return Name(_ident(x, "concept name"))
    h = _head(x, "and", "some", "upper", "lower")
    if h == "and":
        if len(x) < 2:
            raise ParseError("'and' needs at least one argument", _where(x))
        return conj(*[_concept(y) for y in x[1:]])
    if h == "some":
        _arity(x, 3)
        return Exists(_ident(x[1], "role name"), _concept(x[2]))
    _arity(x, 2)
    return (Upper if h == "upper" else Lower)(_concept(x[1]))


def parse_concept(text: str):
    forms = _read_all(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one concept")
    return _concept(forms[0])


# -- knowledge bases ----------------------------------------------------------

def parse_kb(text: str) -> KnowledgeBase:
    tbox, abox = set(), set()
    for f in _read_all(text):
        h = _head(f, "subclass", "subrole", "assert", "assert-role", "indisc")
        if h == "subclass":
            _arity(f, 3)
            tbox.add(GCI(_concept(f[1]), _concept(f[2])))
        elif h == "subrole":
            _arity(f, 3)
            tbox.add(RI(_ident(f[1], "role name"), _ident(f[2], "role name")))
        elif h == "assert":
            _arity(f, 3)
            abox.add(ConceptAssertion(_concept(f[1]), _ident(f[2], "individual")))
        elif h == "assert-role":
            _arity(f, 4)
            abox.add(RoleAssertion(_ident(f[1], "role name"),
                                   _ident(f[2], "individual"),
                                   _ident(f[3], "individual")))
        else:
            _arity(f, 3)
            abox.add(IndiscAssertion(_ident(f[1], "individual"),
                                     _ident(f[2], "individual")))
    return KnowledgeBase(tbox, abox)


def _axiom_line(ax) -> str:
    if isinstance(ax, GCI):
        return f"(subclass {render_concept(ax.lhs)} {render_concept(ax.rhs)})"
    if isinstance(ax, RI):
        return f"(subrole {ax.sub} {ax.sup})"
    if isinstance(ax, ConceptAssertion):
        return f"(assert {render_concept(ax.concept)} {ax.ind})"
    if isinstance(ax, RoleAssertion):
        return f"(assert-role {ax.role} {ax.a} {ax.b})"
    if isinstance(ax, IndiscAssertion):
        return f"(indisc {ax.a} {ax.b})"
    raise TypeError(ax)


def serialize_kb(kb: KnowledgeBase) -> str:
    lines = sorted(_axiom_line(a) for a in kb.tbox)
    lines += sorted(_axiom_line(a) for a in kb.abox)
    return "".join(line + "\n" for line in lines)


# -- queries ------------------------------------------------------------------

def _term(x):
    if isinstance(x, list):
        _head(x, "ind")
        _arity(x, 2)
        return Ind(_ident(x[1], "individual"))
    return Var(_ident(x, "variable"))


def _render_term(t) -> str:
    return f"(ind {t.name})" if isinstance(t, Ind) else t.name


def _query_atoms(forms, out):
    for f in forms:
        h = _head(f, "atom", "role", "rho", "rho-ell", "exists", "some-atoms")
        if h == "atom":
            _arity(f, 3)
            out.append(ConceptAtom(_concept(f[1]), _term(f[2])))
        elif h == "role":
            _arity(f, 4)
            out.append(RoleAtom(_ident(f[1], "role name"), _term(f[2]), _term(f[3])))
        elif h == "rho":
            _arity(f, 3)
            out.append(RhoAtom(_term(f[1]), _term(f[2])))
        elif h == "rho-ell":
            _arity(f, 3)
            out.append(RhoEllAtom(_term(f[1]), _term(f[2])))
        elif h == "exists":
            if len(f) < 2 or not isinstance(f[1], list):
                raise ParseError("'exists' needs a variable list", _where(f), ("(",))
            for v in f[1]:
                _ident(v, "variable")
            _query_atoms(f[2:], out)
        else:
            _query_atoms(f[1:], out)


def parse_query(text: str) -> ConjunctiveQuery:
    forms = _read_all(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one (query ...) form",
                         _where(forms[1]) if forms else None, ("(query",))
    f = forms[0]
    _head(f, "query")
    if len(f) < 2 or not isinstance(f[1], list):
        raise ParseError("missing answer-variable list", _where(f), ("(",))
    head = [_ident(v, "variable") for v in f[1]]
    atoms = []
    _query_atoms(f[2:], atoms)
    try:
        return ConjunctiveQuery(head, atoms)
    except QueryError as e:
        raise ParseError(str(e), _where(f)) from None


def _atom_text(at) -> str:
    if isinstance(at, ConceptAtom):
        return f"(atom {render_concept(at.concept)} {_render_term(at.term)})"
    if isinstance(at, RoleAtom):
        return f"(role {at.role} {_render_term(at.s)} {_render_term(at.t)})"
    if isinstance(at, RhoAtom):
        return f"(rho {_render_term(at.s)} {_render_term(at.t)})"
    if isinstance(at, RhoEllAtom):
        return f"(rho-ell {_render_term(at.s)} {_render_term(at.t)})"
    raise TypeError(at)


def serialize_query(q: ConjunctiveQuery) -> str:
    head = " ".join(v.name for v in q.answer_vars)
    body = "".join("\n  " + a for a in sorted(_atom_text(a) for a in q.atoms))
    return f"(query ({head}){body})\n"


# -- structures ---------------------------------------------------------------

def render_element(e) -> str:
    return str(e)


class _ElemReader:
    """Recursive descent over a rendered element such as x[C,l[a]]."""

    def __init__(self, text):
        self.text, self.i = text, 0

    def fail(self, what):
        raise ParseError(f"bad element syntax near column {self.i + 1}: "
                         f"{self.text!r}", expected=(what,))

    def expect(self, lit):
        if not self.text.startswith(lit, self.i):
            self.fail(repr(lit))
        self.i += len(lit)

    def concept(self):
        t = self.text
        start, depth = self.i, 0
        while self.i < len(t):
            ch = t[self.i]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif depth == 0 and ch in ",]":
                break
            self.i += 1
        return parse_concept(t[start:self.i])

    def element(self):
        t = self.text
        if t.startswith("x[", self.i):
            self.i += 2
            c = self.concept()
            if t.startswith("]", self.i):
                self.i += 1
                return ConceptRep(c)
            self.expect(",")
            seed = self.element()
            self.expect("]")
            return UpperRep(c, seed)
        if t.startswith("l[", self.i):
            self.i += 2
            seed = self.element()
            self.expect("]")
            return LowerRep(seed)
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(t, self.i)
        if not m:
            self.fail("element")
        self.i = m.end()
        return Named(m.group())


def parse_element(text: str):
    r = _ElemReader(text.strip())
    e = r.element()
    if r.i != len(r.text):
        r.fail("end of element")
    return e


def _args(text: str, n: int):
    r = _ElemReader(text)
    out = []
    for k in range(n):
        if k:
            r.expect(", ")
        out.append(r.element())
    r.expect(")")
    if r.i != len(text):
        r.fail("end of line")
    return out


def serialize_structure(s) -> str:
    r = render_element
    lines = [f"concept {c}" for c in s.concepts]
    lines += [f"role {c}" for c in s.roles]
    lines += [f"domain {r(e)}" for e in s.domain]
    for c, ext in s.concept_ext.items():
        lines += [f"{c}({r(e)})" for e in ext]
    for role, ext in s.role_ext.items():
        lines += [f"{role}({r(x)}, {r(y)})" for x, y in ext]
    lines += [f"rho~({r(x)}, {r(y)})" for x, y in s.rho_seed]
    lines += [f"rho_ell({r(x)}, {r(y)})" for x, y in s.rho_ell]
    lines += [f"aux({r(e)})" for e in s.aux]
    lines += [f"aux_rho({r(e)})" for e in s.aux_rho]
    return "".join(line + "\n" for line in sorted(lines))


def parse_structure(text: str):
    concepts, roles, domain = set(), set(), set()
    cext, rext = {}, {}
    seed, ell, aux, aux_rho = set(), set(), set(), set()
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        try:
            kw, _, rest = line.partition(" ")
            if kw == "concept":
                concepts.add(_ident(rest, "concept name"))
            elif kw == "role":
                roles.add(_ident(rest, "role name"))
            elif kw == "domain":
                domain.add(parse_element(rest))
            else:
                pred, paren, rest = line.partition("(")
                if not paren:
                    raise ParseError("expected '('", expected=("(",))
                if pred == "aux":
                    aux.add(_args(rest, 1)[0])
                elif pred == "aux_rho":
                    aux_rho.add(_args(rest, 1)[0])
                elif pred in ("rho~", "rho_ell"):
                    (seed if pred == "rho~" else ell).add(tuple(_args(rest, 2)))
                else:
                    # arity is fixed by what follows the first element
                    try:
                        e = _args(rest, 1)[0]
                    except ParseError:
                        pair = tuple(_args(rest, 2))
                        rext.setdefault(pred, set()).add(pair)
                    else:
                        cext.setdefault(pred, set()).add(e)
        except ParseError as e:
            raise ParseError(str(e), SourceSpan(0, 0, no, 1)) from None
    return make_structure(domain, cext, rext, seed, ell, aux, aux_rho,
                          concepts, roles)


# -- rewritten queries --------------------------------------------------------

def serialize_foquery(q) -> str:
    from .rewriter import Guarded, GuardedOr, NotAux, NotAuxRho

    head = " ".join(v.name for v in q.answer_vars)
    body = sorted(_atom_text(a) for a in q.core)
    for f in q.filters:
        if isinstance(f, NotAux):
            body.append(f"(not-aux {_render_term(f.term)})")
        elif isinstance(f, NotAuxRho):
            body.append(f"(not-aux-rho {_render_term(f.term)})")
        elif isinstance(f, Guarded):
            eqs = " ".join(f"(eq {_render_term(a)} {_render_term(b)})"
                           for a, b in f.equalities)
            body.append(f"(implies (aux {_render_term(f.guard)}) {eqs})")
        elif isinstance(f, GuardedOr):
            alts = " ".join(_atom_text(a) for a in f.disjuncts)
            body.append(f"(implies (aux {_render_term(f.guard)}) (or {alts}))")
    qv = " ".join(v.name for v in sorted(q.quantified_vars))
    inner = "".join("\n    " + b for b in body)
    return f"(foquery ({head})\n  (exists ({qv}){inner}))\n"


def parse_foquery(text: str):
    from .rewriter import FOQuery, Guarded, GuardedOr, NotAux, NotAuxRho

    forms = _read_all(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one (foquery ...) form")
    f = forms[0]
    _head(f, "foquery")
    if len(f) != 3 or not isinstance(f[1], list):
        raise ParseError("malformed foquery", _where(f))
    head = tuple(Var(_ident(v, "variable")) for v in f[1])
    ex = f[2]
    _head(ex, "exists")
    qvars = frozenset(Var(_ident(v, "variable")) for v in ex[1])
    core, filters = [], []
    for g in ex[2:]:
        h = _head(g)
        if h == "not-aux":
            filters.append(NotAux(_term(g[1])))
        elif h == "not-aux-rho":
            filters.append(NotAuxRho(_term(g[1])))
        elif h == "implies":
            guard = g[1]
            _head(guard, "aux")
            t = _term(guard[1])
            if isinstance(g[2], list) and g[2] and g[2][0] == "or":
                alts = []
                _query_atoms(g[2][1:], alts)
                filters.append(GuardedOr(t, tuple(alts)))
            else:
                eqs = []
                for e in g[2:]:
                    _head(e, "eq")
                    _arity(e, 3)
                    eqs.append((_term(e[1]), _term(e[2])))
                filters.append(Guarded(t, tuple(eqs)))
        else:
            _query_atoms([g], core)
    return FOQuery(head, frozenset(core), tuple(filters), qvars)
