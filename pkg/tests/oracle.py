"""Brute-force reference evaluator for the query language.

Interprets the AST directly with backtracking and label environments,
enumerating reachable interval ends per start position; completely
independent of the compiled-NFA engine it is used to check.
"""

import re

from cqk import queryparse as qp
from cqk.corpus import eval_dynamic


def _env_get(env, label):
    for name, pos in env:
        if name == label:
            return pos
    return None


def _env_set(env, label, pos):
    return tuple(sorted([(n, p) for n, p in env if n != label]
                        + [(label, pos)]))


class OracleEvaluator:
    def __init__(self, corpus, max_match_length=1024):
        self.corpus = corpus
        self.maxlen = max_match_length
        self._dyn_cache = {}
        self._freq_cache = {}
        self._start = 0
        self._memo = {}

    # -- value / condition interpretation (regexes via re.fullmatch) ------

    def _freq(self, attr_name, value):
        key = (attr_name, value)
        if key not in self._freq_cache:
            count = 0
            for pos in range(self.corpus.size):
                if self.corpus.value_at(attr_name, pos) == value:
                    count += 1
            self._freq_cache[key] = count
        return self._freq_cache[key]

    def value(self, expr, pos, env):
        corpus = self.corpus
        if isinstance(expr, qp.AttrRef):
            return corpus.value_at(expr.name, pos)
        if isinstance(expr, qp.LabelPath):
            return corpus.value_at(expr.attr, _env_get(env, expr.label))
        if isinstance(expr, qp.StringLiteral):
            return expr.text
        if isinstance(expr, qp.IntLiteral):
            return expr.value
        if isinstance(expr, qp.DynCall):
            args = tuple(self.value(a, pos, env) for a in expr.args)
            key = (expr.name, args)
            if key not in self._dyn_cache:
                self._dyn_cache[key] = eval_dynamic(
                    self.corpus.dynamic[expr.name], list(args))
            return self._dyn_cache[key]
        if isinstance(expr, qp.FreqCall):
            if isinstance(expr.arg, qp.AttrRef):
                value = corpus.value_at(expr.arg.name, pos)
                return self._freq(expr.arg.name, value)
            value = corpus.value_at(expr.arg.attr,
                                    _env_get(env, expr.arg.label))
            return self._freq(expr.arg.attr, value)
        raise TypeError(expr)

    def condition(self, expr, pos, env):
        if isinstance(expr, qp.And):
            return (self.condition(expr.lhs, pos, env)
                    and self.condition(expr.rhs, pos, env))
        if isinstance(expr, qp.Or):
            return (self.condition(expr.lhs, pos, env)
                    or self.condition(expr.rhs, pos, env))
        if isinstance(expr, qp.Not):
            return not self.condition(expr.expr, pos, env)
        if isinstance(expr, qp.Truth):
            return self.value(expr.expr, pos, env) != 0
        if isinstance(expr, qp.Compare):
            lhs = self.value(expr.lhs, pos, env)
            rhs = self.value(expr.rhs, pos, env)
            op = expr.op
            if op in ("<", "<=", ">", ">="):
                return eval("a %s b" % op, {"a": lhs, "b": rhs})
            if isinstance(expr.rhs, qp.StringLiteral) \
                    and isinstance(lhs, str):
                hit = re.fullmatch(rhs, lhs) is not None
            elif isinstance(expr.lhs, qp.StringLiteral) \
                    and isinstance(rhs, str):
                hit = re.fullmatch(lhs, rhs) is not None
            else:
                hit = lhs == rhs
            return hit if op == "=" else not hit
        raise TypeError(expr)

    # -- reachable ends ----------------------------------------------------

    def ends(self, node, pos, env):
        """All (end position, environment) pairs reachable by matching
        ``node`` starting at ``pos``."""
        key = (node, pos, env, self._start)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        out = self._ends(node, pos, env)
        self._memo[key] = out
        return out

    def _ends(self, node, pos, env):
        corpus = self.corpus
        size = corpus.size
        if isinstance(node, qp.Wildcard):
            if pos < size and pos - self._start < self.maxlen:
                env2 = _env_set(env, node.label, pos) if node.label else env
                return frozenset([(pos + 1, env2)])
            return frozenset()
        if isinstance(node, qp.Condition):
            if pos < size and pos - self._start < self.maxlen \
                    and self.condition(node.expr, pos, env):
                env2 = _env_set(env, node.label, pos) if node.label else env
                return frozenset([(pos + 1, env2)])
            return frozenset()
        if isinstance(node, qp.StructTag):
            regions = corpus.regions(node.name).regions
            if node.close:
                ok = pos > 0 and any(e == pos - 1 for _, e in regions)
            else:
                ok = pos < size and any(s == pos for s, _ in regions)
            return frozenset([(pos, env)]) if ok else frozenset()
        if isinstance(node, qp.Concat):
            frontier = {(pos, env)}
            for child in node.children:
                frontier = {r for p, e in frontier
                            for r in self.ends(child, p, e)}
                if not frontier:
                    break
            return frozenset(frontier)
        if isinstance(node, qp.Alternation):
            out = set()
            for child in node.children:
                out |= self.ends(child, pos, env)
            return frozenset(out)
        if isinstance(node, qp.Repeat):
            out = set()
            frontier = {(pos, env)}
            seen = set()
            if node.min == 0:
                out |= frontier
            k = 0
            while frontier and (node.max is None or k < node.max):
                step = {r for p, e in frontier
                        for r in self.ends(node.child, p, e)}
                k += 1
                if k >= node.min:
                    # dedup only once the minimum count is reached, so
                    # zero-width iterations still accumulate towards it
                    out |= step
                    frontier = step - seen
                    seen |= step
                else:
                    frontier = step
            return frozenset(out)
        raise TypeError(node)

    def within_ok(self, within, start, end):
        count, name = within
        regions = self.corpus.regions(name).regions
        indices = []
        for pos in range(start, end + 1):
            idx = None
            for i, (s, e) in enumerate(regions):
                if s <= pos <= e:
                    idx = i
                    break
            if idx is None:
                return False
            indices.append(idx)
        return indices[-1] - indices[0] <= count - 1


def oracle_query(ast, corpus, max_match_length=1024, subcorpus=None):
    """Longest-match-per-start evaluation by exhaustive interval
    enumeration; returns a sorted interval list."""
    evaluator = OracleEvaluator(corpus, max_match_length)
    intervals = []
    for p in range(corpus.size):
        if subcorpus is not None and not any(
                s <= p <= e for s, e in subcorpus.intervals):
            continue
        evaluator._start = p
        reachable = {e for e, _ in evaluator.ends(ast.pattern, p, ())
                     if e > p}
        if not reachable:
            continue
        # longest match per start; within / subcorpus filter it out
        # entirely rather than backing off to a shorter match
        start, last = p, max(reachable) - 1
        if ast.within and not evaluator.within_ok(ast.within, start, last):
            continue
        if subcorpus is not None and not any(
                s <= start and last <= e for s, e in subcorpus.intervals):
            continue
        intervals.append((start, last))
    return sorted(set(intervals))
