"""Lexer, parser and pretty-printer for the corpus query language.

A query is a regular expression over token conditions, optionally
followed by a ``within`` constraint:

    [word="chair.*" & pos != "N.*"]
    "president" []* "said" within s
    a:[pos="N.*"] ([]* [word=a.word]){2} within s

Bare quoted strings abbreviate ``[word="..."]``; ``<name>`` and
``</name>`` assert region boundaries; ``a:`` labels a condition so that
later conditions can reference attribute values at the labelled
position (``a.word``).
"""

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import QuerySyntaxError

# -- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class AttrRef:
    name: str


@dataclass(frozen=True)
class LabelPath:
    label: str
    attr: str


@dataclass(frozen=True)
class StringLiteral:
    text: str


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class DynCall:
    name: str
    args: tuple


@dataclass(frozen=True)
class FreqCall:
    arg: object


@dataclass(frozen=True)
class Compare:
    lhs: object
    op: str  # = != < <= > >=
    rhs: object


@dataclass(frozen=True)
class Truth:
    expr: object


@dataclass(frozen=True)
class And:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Or:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Not:
    expr: object


@dataclass(frozen=True)
class Condition:
    expr: object
    label: Optional[str] = None


@dataclass(frozen=True)
class Wildcard:
    label: Optional[str] = None


@dataclass(frozen=True)
class StructTag:
    name: str
    close: bool = False


@dataclass(frozen=True)
class Concat:
    children: tuple


@dataclass(frozen=True)
class Alternation:
    children: tuple


@dataclass(frozen=True)
class Repeat:
    child: object
    min: int
    max: Optional[int]  # None = unbounded


@dataclass(frozen=True)
class QueryAST:
    pattern: object
    within: Optional[tuple] = None  # (count, structural name)


# -- lexer ----------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_TAG = re.compile(r"</?([A-Za-z_][A-Za-z0-9_-]*)>")
_INT = re.compile(r"[0-9]+")


@dataclass
class Token:
    kind: str
    value: object
    line: int
    col: int


class _Lexer:
    """Context-sensitive scanner: ``< > ( ) |`` mean different things
    inside ``[...]`` conditions than in the surrounding pattern."""

    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.in_brackets = False

    def _location(self, offset):
        line = self.text.count("\n", 0, offset) + 1
        last_nl = self.text.rfind("\n", 0, offset)
        return line, offset - last_nl

    def error(self, message, offset=None, expected=()):
        line, col = self._location(self.pos if offset is None else offset)
        raise QuerySyntaxError(message, line, col, expected)

    def tokens(self):
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _make(self, kind, value, offset):
        line, col = self._location(offset)
        return Token(kind, value, line, col)

    def _next(self):
        text = self.text
        while self.pos < len(text) and text[self.pos].isspace():
            self.pos += 1
        start = self.pos
        if start >= len(text):
            return self._make("eof", None, start)
        ch = text[start]

        if ch == '"':
            return self._string(start)
        if ch == "[":
            self.pos += 1
            self.in_brackets = True
            return self._make("[", "[", start)
        if ch == "]":
            self.pos += 1
            self.in_brackets = False
            return self._make("]", "]", start)
        if self.in_brackets:
            return self._next_condition(start)
        return self._next_pattern(start)

    def _string(self, start):
        text = self.text
        i = start + 1
        out = []
        while i < len(text):
            ch = text[i]
            if ch == "\\" and i + 1 < len(text):
                nxt = text[i + 1]
                if nxt in ('"', "\\"):
                    out.append(nxt)
                else:
                    out.append(ch + nxt)
                i += 2
                continue
            if ch == '"':
                self.pos = i + 1
                return self._make("string", "".join(out), start)
            out.append(ch)
            i += 1
        self.error("unterminated string", start)

    def _next_pattern(self, start):
        text = self.text
        ch = text[start]
        for sym in ("(", ")", "|", "*", "+", "?", "{", "}", ",", ";", ":"):
            if ch == sym:
                self.pos = start + 1
                return self._make(sym, sym, start)
        if ch == "<":
            m = _TAG.match(text, start)
            if not m:
                self.error("malformed structural tag", start)
            self.pos = m.end()
            return self._make("tag", (m.group(1), text[start + 1] == "/"),
                              start)
        m = _INT.match(text, start)
        if m:
            self.pos = m.end()
            return self._make("int", int(m.group()), start)
        m = _NAME.match(text, start)
        if m:
            self.pos = m.end()
            return self._make("name", m.group(), start)
        self.error("unexpected character %r" % ch, start)

    def _next_condition(self, start):
        text = self.text
        two = text[start:start + 2]
        if two in ("!=", "<=", ">="):
            self.pos = start + 2
            return self._make(two, two, start)
        ch = text[start]
        for sym in ("(", ")", ",", ".", "&", "|", "!", "=", "<", ">"):
            if ch == sym:
                self.pos = start + 1
                return self._make(sym, sym, start)
        m = _INT.match(text, start)
        if m:
            self.pos = m.end()
            return self._make("int", int(m.group()), start)
        m = _NAME.match(text, start)
        if m:
            self.pos = m.end()
            return self._make("name", m.group(), start)
        self.error("unexpected character %r in condition" % ch, start)


# -- parser ---------------------------------------------------------------

_ORDER_OPS = ("<", "<=", ">", ">=")
_COMPARE_OPS = ("=", "!=") + _ORDER_OPS


class _Parser:
    def __init__(self, text):
        self.tokens = _Lexer(text).tokens()
        self.index = 0
        self.labels = set()

    @property
    def tok(self):
        return self.tokens[self.index]

    def advance(self):
        tok = self.tok
        self.index += 1
        return tok

    def error(self, message, expected=()):
        tok = self.tok
        raise QuerySyntaxError(message, tok.line, tok.col, expected)

    def expect(self, kind):
        if self.tok.kind != kind:
            self.error("unexpected %s" % self._describe(self.tok),
                       expected={kind})
        return self.advance()

    @staticmethod
    def _describe(tok):
        return "end of query" if tok.kind == "eof" else "%r" % (tok.value,)

    def parse(self):
        pattern = self.alternation()
        within = None
        if self.tok.kind == "name" and self.tok.value == "within":
            self.advance()
            count = 1
            if self.tok.kind == "int":
                count = self.advance().value
                if count < 1:
                    self.error("within count must be >= 1")
            within = (count, self.expect("name").value)
        if self.tok.kind == ";":
            self.advance()
        if self.tok.kind != "eof":
            self.error("unexpected %s" % self._describe(self.tok),
                       expected={"eof"})
        return QueryAST(pattern, within)

    def alternation(self):
        branches = [self.sequence()]
        while self.tok.kind == "|":
            self.advance()
            branches.append(self.sequence())
        if len(branches) == 1:
            return branches[0]
        return Alternation(tuple(branches))

    _ATOM_STARTS = ("[", "(", "string", "tag", "name")

    def sequence(self):
        items = [self.repetition()]
        while self.tok.kind in self._ATOM_STARTS \
                and not (self.tok.kind == "name"
                         and self.tok.value == "within"):
            items.append(self.repetition())
        if len(items) == 1:
            return items[0]
        return Concat(tuple(items))

    def repetition(self):
        node = self.atom()
        kind = self.tok.kind
        if kind == "*":
            self.advance()
            return Repeat(node, 0, None)
        if kind == "+":
            self.advance()
            return Repeat(node, 1, None)
        if kind == "?":
            self.advance()
            return Repeat(node, 0, 1)
        if kind == "{":
            self.advance()
            low = self.expect("int").value
            high = low
            if self.tok.kind == ",":
                self.advance()
                high = None
                if self.tok.kind == "int":
                    high = self.advance().value
            self.expect("}")
            if high is not None and high < low:
                self.error("bad repetition interval {%d,%d}" % (low, high))
            return Repeat(node, low, high)
        return node

    def atom(self):
        tok = self.tok
        if tok.kind == "(":
            self.advance()
            node = self.alternation()
            self.expect(")")
            return node
        if tok.kind == "tag":
            self.advance()
            name, close = tok.value
            return StructTag(name, close)
        if tok.kind == "name":
            label = self.advance().value
            self.expect(":")
            node = self._condition_atom()
            if isinstance(node, Condition):
                node = Condition(node.expr, label)
            else:
                node = Wildcard(label)
            self.labels.add(label)
            return node
        node = self._condition_atom()
        if isinstance(node, Condition) and node.label:
            self.labels.add(node.label)
        return node

    def _condition_atom(self):
        tok = self.tok
        if tok.kind == "string":
            self.advance()
            return Condition(Compare(AttrRef("word"), "=",
                                     StringLiteral(tok.value)))
        if tok.kind == "[":
            self.advance()
            if self.tok.kind == "]":
                self.advance()
                return Wildcard()
            expr = self.bool_or()
            self.expect("]")
            return Condition(expr)
        self.error("unexpected %s" % self._describe(tok),
                   expected={"[", "string"})

    # boolean expressions inside [ ... ]

    def bool_or(self):
        node = self.bool_and()
        while self.tok.kind == "|":
            self.advance()
            node = Or(node, self.bool_and())
        return node

    def bool_and(self):
        node = self.bool_not()
        while self.tok.kind == "&":
            self.advance()
            node = And(node, self.bool_not())
        return node

    def bool_not(self):
        if self.tok.kind == "!":
            self.advance()
            return Not(self.bool_not())
        return self.bool_atom()

    def bool_atom(self):
        if self.tok.kind == "(":
            self.advance()
            node = self.bool_or()
            self.expect(")")
            return node
        lhs = self.value_expr()
        if self.tok.kind in _COMPARE_OPS:
            op = self.advance().kind
            rhs = self.value_expr()
            if op in _ORDER_OPS:
                for side in (lhs, rhs):
                    if isinstance(side, (StringLiteral, AttrRef, LabelPath)):
                        self.error("operand of %r must be integer-valued"
                                   % op)
            return Compare(lhs, op, rhs)
        return Truth(lhs)

    def value_expr(self):
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return IntLiteral(tok.value)
        if tok.kind == "string":
            self.advance()
            return StringLiteral(tok.value)
        if tok.kind == "name":
            name = self.advance().value
            if self.tok.kind == "(":
                self.advance()
                args = [self.value_expr()]
                while self.tok.kind == ",":
                    self.advance()
                    args.append(self.value_expr())
                self.expect(")")
                if name == "f":
                    if len(args) != 1:
                        self.error("f takes exactly one argument")
                    return FreqCall(args[0])
                return DynCall(name, tuple(args))
            if self.tok.kind == ".":
                self.advance()
                attr = self.expect("name").value
                if name not in self.labels:
                    self.error("label %r used before definition" % name)
                return LabelPath(name, attr)
            return AttrRef(name)
        self.error("unexpected %s" % self._describe(tok),
                   expected={"name", "int", "string"})


def parse_query(text):
    """Parse query text into a :class:`QueryAST`."""
    return _Parser(text).parse()


# -- pretty printer -------------------------------------------------------

def _print_value(expr):
    if isinstance(expr, AttrRef):
        return expr.name
    if isinstance(expr, LabelPath):
        return "%s.%s" % (expr.label, expr.attr)
    if isinstance(expr, StringLiteral):
        escaped = expr.text.replace("\\", "\\\\").replace('"', '\\"')
        return '"%s"' % escaped
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, DynCall):
        return "%s(%s)" % (expr.name,
                           ", ".join(_print_value(a) for a in expr.args))
    if isinstance(expr, FreqCall):
        return "f(%s)" % _print_value(expr.arg)
    raise TypeError(expr)


def _print_bool(expr, parent_level=0):
    # precedence levels: Or=1, And=2, Not/atoms=3
    if isinstance(expr, Or):
        text = "%s | %s" % (_print_bool(expr.lhs, 1),
                            _print_bool(expr.rhs, 2))
        level = 1
    elif isinstance(expr, And):
        text = "%s & %s" % (_print_bool(expr.lhs, 2),
                            _print_bool(expr.rhs, 3))
        level = 2
    elif isinstance(expr, Not):
        text = "!%s" % _print_bool(expr.expr, 3)
        level = 3
    elif isinstance(expr, Compare):
        text = "%s %s %s" % (_print_value(expr.lhs), expr.op,
                             _print_value(expr.rhs))
        level = 3
    elif isinstance(expr, Truth):
        text = _print_value(expr.expr)
        level = 3
    else:
        raise TypeError(expr)
    if level < parent_level:
        return "(%s)" % text
    return text


def _print_node(node, parent_binds=False):
    if isinstance(node, Condition):
        text = "[%s]" % _print_bool(node.expr)
        if node.label:
            text = "%s:%s" % (node.label, text)
        return text
    if isinstance(node, Wildcard):
        return "%s:[]" % node.label if node.label else "[]"
    if isinstance(node, StructTag):
        return "<%s%s>" % ("/" if node.close else "", node.name)
    if isinstance(node, Concat):
        text = " ".join(
            _print_node(c, parent_binds=isinstance(c, (Concat, Alternation)))
            for c in node.children)
        return "(%s)" % text if parent_binds else text
    if isinstance(node, Alternation):
        text = " | ".join(
            _print_node(c, parent_binds=isinstance(c, Alternation))
            for c in node.children)
        return "(%s)" % text if parent_binds else text
    if isinstance(node, Repeat):
        child = _print_node(node.child, parent_binds=True)
        if (node.min, node.max) == (0, None):
            text = child + "*"
        elif (node.min, node.max) == (1, None):
            text = child + "+"
        elif (node.min, node.max) == (0, 1):
            text = child + "?"
        elif node.max is None:
            text = "%s{%d,}" % (child, node.min)
        elif node.min == node.max:
            text = "%s{%d}" % (child, node.min)
        else:
            text = "%s{%d,%d}" % (child, node.min, node.max)
        return "(%s)" % text if parent_binds else text
    raise TypeError(node)


def print_query(ast):
    """Render an AST back to query text; ``parse_query`` inverts this."""
    text = _print_node(ast.pattern)
    if ast.within:
        count, name = ast.within
        if count == 1:
            text += " within %s" % name
        else:
            text += " within %d %s" % (count, name)
    return text
