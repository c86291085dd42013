"""
roughel
=======

Conjunctive query answering over rough EL knowledge bases by the
combined approach: a knowledge base is materialized into a finite
canonical structure, a query is rewritten into a filtered first-order
query, and evaluating the latter over the former gives the certain
answers.

Modules
-------
core        concepts, axioms, queries, finite structures, model checking
textio      s-expression formats (.rkb, .rcq, .rfs, .rfo)
normalizer  normal form with fresh names
saturator   consequence-based saturation and entailment
canonical   canonical structures and their reachable part
rewriter    unfolding and filtered rewriting
evaluator   evaluation, the answering pipeline, SQL emission
oracle      reference answers by homomorphism search over the unraveling
fuzz        random knowledge bases and queries
cli         command-line front end
"""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .textio import (
    ParseError, parse_concept, parse_foquery, parse_kb, parse_query,
    parse_structure, serialize_foquery, serialize_kb, serialize_query,
    serialize_structure,
)
from .normalizer import normalize, normalize_kb
from .saturator import (
    entails_assertion, entails_role_inclusion, entails_subsumption, saturate,
)
from .canonical import build_canonical, granule_of, materialize
from .rewriter import FOQuery, rewrite, unfold
from .evaluator import answer, emit_relational, evaluate, prepare, run_sql
from .oracle import certain_answers_oracle, unravel

__version__ = "0.1.0"

__all__ = list(_core_all) + [
    "ParseError", "parse_concept", "parse_foquery", "parse_kb", "parse_query",
    "parse_structure", "serialize_foquery", "serialize_kb", "serialize_query",
    "serialize_structure", "normalize", "normalize_kb", "entails_assertion",
    "entails_role_inclusion", "entails_subsumption", "saturate",
    "build_canonical", "granule_of", "materialize", "FOQuery", "rewrite",
    "unfold", "answer", "emit_relational", "evaluate", "prepare", "run_sql",
    "certain_answers_oracle", "unravel",
]
