"""Compile parsed queries to a condition-NFA and evaluate them.

Evaluation reports, for every corpus position where at least one match
starts, the longest match starting there (never zero-length), subject
to the ``within`` constraint and an optional subcorpus restriction.
Dynamic attribute calls are cached per query run.
"""

import bisect
import re
from dataclasses import dataclass, field
from typing import Optional

from . import queryparse as q
from .corpus import eval_dynamic
from .errors import CqkError, QueryCompileError, UnknownAttributeError
from .queryparse import (And, AttrRef, Compare, Concat, Condition, DynCall,
                         FreqCall, IntLiteral, LabelPath, Not, Or, Repeat,
                         StringLiteral, StructTag, Truth, Wildcard)

DEFAULT_MAX_MATCH_LENGTH = 1024

# edge kinds
EPS = 0
COND = 1     # boolean test, consumes one position
WILD = 2     # consumes one position unconditionally
OPEN = 3     # zero-width: next position starts a region
CLOSE = 4    # zero-width: previous position ends a region


@dataclass(frozen=True)
class MatchSet:
    """A sorted, duplicate-free set of corpus intervals."""

    corpus_id: str
    intervals: tuple  # of (start, end), inclusive bounds

    @classmethod
    def build(cls, corpus_id, intervals):
        return cls(corpus_id, tuple(sorted(set(map(tuple, intervals)))))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def containing_interval(self, start, end):
        """The interval of this set that contains [start, end], or None."""
        i = bisect.bisect_right(self.intervals, (start, end))
        for j in (i - 1, min(i, len(self.intervals) - 1)):
            if 0 <= j < len(self.intervals):
                s, e = self.intervals[j]
                if s <= start and end <= e:
                    return (s, e)
        # fall back to scan: intervals may overlap arbitrarily
        for s, e in self.intervals:
            if s <= start and end <= e:
                return (s, e)
            if s > start:
                break
        return None


@dataclass
class Program:
    """A compiled query: an NFA over condition edges."""

    edges: list  # per state: list of (kind, data, target)
    start: int
    accept: int
    label_slots: dict
    within: Optional[tuple]
    max_match_length: int = DEFAULT_MAX_MATCH_LENGTH
    regexes: dict = field(default_factory=dict)


class _Builder:
    def __init__(self, corpus, label_slots):
        self.corpus = corpus
        self.labels = label_slots
        self.edges = []

    def state(self):
        self.edges.append([])
        return len(self.edges) - 1

    def edge(self, src, kind, data, dst):
        self.edges[src].append((kind, data, dst))

    def build(self, node):
        """Thompson construction; returns (entry, exit) states."""
        if isinstance(node, (Condition, Wildcard)):
            s, a = self.state(), self.state()
            slot = self.labels[node.label] if node.label else None
            if isinstance(node, Wildcard):
                self.edge(s, WILD, slot, a)
            else:
                self.edge(s, COND, (node.expr, slot), a)
            return s, a
        if isinstance(node, StructTag):
            s, a = self.state(), self.state()
            self.edge(s, CLOSE if node.close else OPEN, node.name, a)
            return s, a
        if isinstance(node, Concat):
            s, a = self.build(node.children[0])
            for child in node.children[1:]:
                cs, ca = self.build(child)
                self.edge(a, EPS, None, cs)
                a = ca
            return s, a
        if isinstance(node, q.Alternation):
            s, a = self.state(), self.state()
            for child in node.children:
                cs, ca = self.build(child)
                self.edge(s, EPS, None, cs)
                self.edge(ca, EPS, None, a)
            return s, a
        if isinstance(node, Repeat):
            s = self.state()
            cur = s
            for _ in range(node.min):
                cs, ca = self.build(node.child)
                self.edge(cur, EPS, None, cs)
                cur = ca
            a = self.state()
            if node.max is None:
                cs, ca = self.build(node.child)
                self.edge(cur, EPS, None, cs)
                self.edge(ca, EPS, None, cur)
                self.edge(cur, EPS, None, a)
            else:
                self.edge(cur, EPS, None, a)
                for _ in range(node.max - node.min):
                    cs, ca = self.build(node.child)
                    self.edge(cur, EPS, None, cs)
                    cur = ca
                    self.edge(cur, EPS, None, a)
            return s, a
        raise TypeError(node)


def _collect_labels(node, out):
    if isinstance(node, (Condition, Wildcard)):
        if node.label and node.label not in out:
            out[node.label] = len(out)
    elif isinstance(node, (Concat, q.Alternation)):
        for child in node.children:
            _collect_labels(child, out)
    elif isinstance(node, Repeat):
        _collect_labels(node.child, out)


def _validate_expr(expr, corpus, regexes):
    if isinstance(expr, (And, Or)):
        _validate_expr(expr.lhs, corpus, regexes)
        _validate_expr(expr.rhs, corpus, regexes)
    elif isinstance(expr, Not):
        _validate_expr(expr.expr, corpus, regexes)
    elif isinstance(expr, Compare):
        _validate_value(expr.lhs, corpus, regexes)
        _validate_value(expr.rhs, corpus, regexes)
    elif isinstance(expr, Truth):
        _validate_value(expr.expr, corpus, regexes)
        inner = expr.expr
        if isinstance(inner, DynCall):
            if corpus.dynamic[inner.name].return_type != "INT":
                raise QueryCompileError(
                    "dynamic attribute %r is not integer-valued and cannot "
                    "stand alone as a condition" % inner.name)
        elif not isinstance(inner, FreqCall):
            raise QueryCompileError(
                "bare condition %s is not integer-valued"
                % q._print_value(inner))
    else:
        raise TypeError(expr)


def _validate_value(expr, corpus, regexes):
    if isinstance(expr, AttrRef):
        if expr.name not in corpus.positional:
            raise QueryCompileError(
                "unknown attribute %r" % expr.name)
    elif isinstance(expr, LabelPath):
        if expr.attr not in corpus.positional:
            raise QueryCompileError(
                "unknown attribute %r in label path" % expr.attr)
    elif isinstance(expr, StringLiteral):
        if expr.text not in regexes:
            try:
                regexes[expr.text] = re.compile(expr.text)
            except re.error as exc:
                raise QueryCompileError(
                    "bad value regular expression %r: %s"
                    % (expr.text, exc)) from exc
    elif isinstance(expr, IntLiteral):
        pass
    elif isinstance(expr, DynCall):
        decl = corpus.dynamic.get(expr.name)
        if decl is None:
            raise QueryCompileError(
                "unknown dynamic attribute %r" % expr.name)
        if len(expr.args) != len(decl.arg_types):
            raise QueryCompileError(
                "dynamic attribute %r takes %d argument(s), got %d"
                % (expr.name, len(decl.arg_types), len(expr.args)))
        for arg in expr.args:
            _validate_value(arg, corpus, regexes)
    elif isinstance(expr, FreqCall):
        if not isinstance(expr.arg, (AttrRef, LabelPath)):
            raise QueryCompileError(
                "f() needs an attribute reference argument")
        _validate_value(expr.arg, corpus, regexes)
    else:
        raise TypeError(expr)


def _validate_pattern(node, corpus, regexes):
    if isinstance(node, Condition):
        _validate_expr(node.expr, corpus, regexes)
    elif isinstance(node, Wildcard):
        pass
    elif isinstance(node, StructTag):
        if node.name not in corpus.structural:
            raise QueryCompileError(
                "unknown structural attribute %r" % node.name)
    elif isinstance(node, (Concat, q.Alternation)):
        for child in node.children:
            _validate_pattern(child, corpus, regexes)
    elif isinstance(node, Repeat):
        _validate_pattern(node.child, corpus, regexes)
    else:
        raise TypeError(node)


def compile_query(ast, corpus, max_match_length=DEFAULT_MAX_MATCH_LENGTH):
    """Compile an AST for one corpus, checking all names it refers to."""
    regexes = {}
    _validate_pattern(ast.pattern, corpus, regexes)
    if ast.within and ast.within[1] not in corpus.structural:
        raise QueryCompileError(
            "unknown structural attribute %r in within clause"
            % ast.within[1])
    labels = {}
    _collect_labels(ast.pattern, labels)
    builder = _Builder(corpus, labels)
    start, accept = builder.build(ast.pattern)
    return Program(edges=builder.edges, start=start, accept=accept,
                   label_slots=labels, within=ast.within,
                   max_match_length=max_match_length, regexes=regexes)


class EvalContext:
    """Per-query evaluation state: the corpus, compiled value regexes
    and the dynamic-attribute call cache."""

    def __init__(self, corpus, regexes=None):
        self.corpus = corpus
        self.regexes = regexes if regexes is not None else {}
        self.dyn_cache = {}

    def regex(self, pattern):
        compiled = self.regexes.get(pattern)
        if compiled is None:
            compiled = self.regexes[pattern] = re.compile(pattern)
        return compiled

    def call_dynamic(self, name, args):
        key = (name, args)
        if key not in self.dyn_cache:
            self.dyn_cache[key] = eval_dynamic(
                self.corpus.dynamic[name], list(args))
        return self.dyn_cache[key]


def _value(expr, pos, env, ctx):
    """Evaluate a value expression to a Python str or int."""
    corpus = ctx.corpus
    if isinstance(expr, AttrRef):
        return corpus.value_at(expr.name, pos)
    if isinstance(expr, LabelPath):
        lpos = env.get(expr.label)
        if lpos is None:
            raise CqkError("internal: label %r unbound at evaluation time"
                           % expr.label)
        return corpus.value_at(expr.attr, lpos)
    if isinstance(expr, StringLiteral):
        return expr.text
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, DynCall):
        args = tuple(_value(a, pos, env, ctx) for a in expr.args)
        return ctx.call_dynamic(expr.name, args)
    if isinstance(expr, FreqCall):
        if isinstance(expr.arg, AttrRef):
            attr = corpus.attr(expr.arg.name)
            return attr.freq(attr.id_at(pos))
        attr = corpus.attr(expr.arg.attr)
        lpos = env.get(expr.arg.label)
        if lpos is None:
            raise CqkError("internal: label %r unbound at evaluation time"
                           % expr.arg.label)
        return attr.freq(attr.id_at(lpos))
    raise TypeError(expr)


def eval_condition(expr, pos, env, ctx):
    """Truth value of a boolean condition at one corpus position.

    ``env`` maps label names to the positions their atoms matched.
    Value regexes are anchored: a string-literal comparison is true only
    when the pattern matches the entire attribute value.
    """
    if isinstance(expr, And):
        return (eval_condition(expr.lhs, pos, env, ctx)
                and eval_condition(expr.rhs, pos, env, ctx))
    if isinstance(expr, Or):
        return (eval_condition(expr.lhs, pos, env, ctx)
                or eval_condition(expr.rhs, pos, env, ctx))
    if isinstance(expr, Not):
        return not eval_condition(expr.expr, pos, env, ctx)
    if isinstance(expr, Truth):
        value = _value(expr.expr, pos, env, ctx)
        if not isinstance(value, int):
            raise CqkError("bare condition value %r is not an integer"
                           % (value,))
        return value != 0
    if isinstance(expr, Compare):
        lhs = _value(expr.lhs, pos, env, ctx)
        rhs = _value(expr.rhs, pos, env, ctx)
        op = expr.op
        if op in ("<", "<=", ">", ">="):
            if not (isinstance(lhs, int) and isinstance(rhs, int)):
                raise CqkError(
                    "operands of %r must be integers, got %r and %r"
                    % (op, lhs, rhs))
            return {"<": lhs < rhs, "<=": lhs <= rhs,
                    ">": lhs > rhs, ">=": lhs >= rhs}[op]
        # = / != : regex match when one side is a string literal and the
        # other is string-valued, literal comparison otherwise
        if isinstance(expr.rhs, StringLiteral) and isinstance(lhs, str):
            result = ctx.regex(rhs).fullmatch(lhs) is not None
        elif isinstance(expr.lhs, StringLiteral) and isinstance(rhs, str):
            result = ctx.regex(lhs).fullmatch(rhs) is not None
        elif isinstance(lhs, int) == isinstance(rhs, int):
            result = lhs == rhs
        else:
            raise CqkError("cannot compare %r with %r" % (lhs, rhs))
        return result if op == "=" else not result
    raise TypeError(expr)


def _match_ends(program, ctx, start_pos):
    """All end positions (exclusive) of matches starting at start_pos,
    each paired with the final label environment."""
    corpus = ctx.corpus
    size = corpus.size
    nslots = len(program.label_slots)
    slot_names = {i: name for name, i in program.label_slots.items()}
    maxlen = program.max_match_length

    results = {}
    init_env = (None,) * nslots
    stack = [(program.start, start_pos, init_env)]
    seen = set()
    while stack:
        state, pos, env = stack.pop()
        key = (state, pos, env)
        if key in seen:
            continue
        seen.add(key)
        if state == program.accept and pos > start_pos:
            if pos not in results:
                results[pos] = env
        for kind, data, target in program.edges[state]:
            if kind == EPS:
                stack.append((target, pos, env))
            elif kind == OPEN:
                regions = corpus.regions(data)
                idx = regions.containing(pos) if pos < size else None
                if idx is not None and regions.bounds(idx)[0] == pos:
                    stack.append((target, pos, env))
            elif kind == CLOSE:
                if pos > 0:
                    regions = corpus.regions(data)
                    idx = regions.containing(pos - 1)
                    if idx is not None \
                            and regions.bounds(idx)[1] == pos - 1:
                        stack.append((target, pos, env))
            else:
                if pos >= size or pos - start_pos >= maxlen:
                    continue
                if kind == COND:
                    expr, slot = data
                    envmap = {slot_names[i]: p
                              for i, p in enumerate(env) if p is not None}
                    if not eval_condition(expr, pos, envmap, ctx):
                        continue
                else:
                    slot = data
                newenv = env if slot is None \
                    else env[:slot] + (pos,) + env[slot + 1:]
                stack.append((target, pos + 1, newenv))
    return sorted(results)


def _within_ok(corpus, within, start, end):
    count, name = within
    regions = corpus.regions(name)
    first = regions.containing(start)
    last = regions.containing(end)
    if first is None or last is None or last - first > count - 1:
        return False
    for pos in range(start, end + 1):
        if regions.containing(pos) is None:
            return False
    return True


def eval_query(program, corpus, subcorpus=None):
    """Run a compiled query, returning its :class:`MatchSet`."""
    if subcorpus is not None and subcorpus.corpus_id != corpus.id:
        raise CqkError(
            "subcorpus belongs to %r, not %r"
            % (subcorpus.corpus_id, corpus.id))
    ctx = EvalContext(corpus, dict(program.regexes))

    if subcorpus is None:
        starts = range(corpus.size)
    else:
        starts = sorted({p for s, e in subcorpus.intervals
                         for p in range(s, e + 1)})

    intervals = []
    for p in starts:
        ends = _match_ends(program, ctx, p)
        if not ends:
            continue
        # the longest match wins; within / subcorpus then act as filters
        # on that match rather than falling back to a shorter one
        start, last = p, max(ends) - 1
        if program.within and not _within_ok(corpus, program.within,
                                             start, last):
            continue
        if subcorpus is not None \
                and subcorpus.containing_interval(start, last) is None:
            continue
        intervals.append((start, last))
    return MatchSet.build(corpus.id, intervals)


def run_query(text, corpus, subcorpus=None,
              max_match_length=DEFAULT_MAX_MATCH_LENGTH):
    """Parse, compile and evaluate query text in one step."""
    ast = q.parse_query(text)
    program = compile_query(ast, corpus, max_match_length)
    return eval_query(program, corpus, subcorpus)
