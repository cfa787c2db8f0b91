"""cqk: a corpus query workbench.

Indexed corpus encoding, a regular-expression-over-conditions query
language, result set algebra, KWIC concordancing, aligned display and
client/server corpus access.
"""

from .corpus import Corpus, eval_dynamic
from .errors import CqkError
from .queryeval import MatchSet, compile_query, eval_query, run_query
from .queryparse import parse_query, print_query

__all__ = [
    "Corpus", "CqkError", "MatchSet", "compile_query", "eval_dynamic",
    "eval_query", "parse_query", "print_query", "run_query",
]
