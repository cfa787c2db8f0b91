import pytest
from hypothesis import given, settings, strategies as st

from cqk.errors import QuerySyntaxError
from cqk.queryparse import (And, AttrRef, Compare, Concat, Condition,
                            DynCall, FreqCall, IntLiteral, LabelPath, Not,
                            Or, Repeat, StringLiteral, StructTag, Truth,
                            Wildcard, Alternation, QueryAST, parse_query,
                            print_query)

# analogues of the published example queries, over word/pos/num
# attributes plus the dynamic attributes ishuman and f
GOLDEN_QUERIES = [
    '[word="chair.*" & pos != "N.*"]',
    '[pos="JJ.*"] [pos="N.*"] "and|or" [pos="N.*"] '
    '[pos="IN" & word != "that"]',
    '"kill.*" []? [pos="N.*" & ishuman(word)]',
    '"love.*" []? [pos="N.*" & f(word)>10 & ishuman(word)];',
    '[pos="N.*"] [] <s> "She"',
    '"president" []* "said"',
    '"president" []* "said" within s;',
    'a:[pos="N.*"] []',
    'a:[pos="N.*"] []* [pos="PRP" & num=a.num] within s;',
    'a:[pos="N.*"] ([]* [word=a.word]){2} within s;',
]


@pytest.mark.parametrize("text", GOLDEN_QUERIES)
def test_golden_queries_parse(text):
    ast = parse_query(text)
    assert isinstance(ast, QueryAST)


def test_parse_condition_with_and():
    ast = parse_query('[word="chair.*" & pos != "N.*"]')
    assert ast.pattern == Condition(And(
        Compare(AttrRef("word"), "=", StringLiteral("chair.*")),
        Compare(AttrRef("pos"), "!=", StringLiteral("N.*"))))
    assert ast.within is None


def test_parse_within_and_sugar():
    ast = parse_query('"president" []* "said" within s')
    word = AttrRef("word")
    assert ast.pattern == Concat((
        Condition(Compare(word, "=", StringLiteral("president"))),
        Repeat(Wildcard(), 0, None),
        Condition(Compare(word, "=", StringLiteral("said")))))
    assert ast.within == (1, "s")


def test_parse_within_count():
    assert parse_query('"a" within 2 s').within == (2, "s")


def test_parse_labels_and_interval():
    ast = parse_query('a:[pos="N.*"] ([]* [word=a.word]){2} within s')
    first, group = ast.pattern.children
    assert first == Condition(
        Compare(AttrRef("pos"), "=", StringLiteral("N.*")), label="a")
    assert group == Repeat(
        Concat((Repeat(Wildcard(), 0, None),
                Condition(Compare(AttrRef("word"), "=",
                                  LabelPath("a", "word"))))), 2, 2)


def test_parse_struct_tags():
    ast = parse_query('<s> "the" </s>')
    assert ast.pattern.children[0] == StructTag("s", close=False)
    assert ast.pattern.children[2] == StructTag("s", close=True)


def test_parse_repeat_forms():
    pattern = parse_query("[]* []+ []? []{2} []{2,} []{2,4}").pattern
    mins_maxs = [(c.min, c.max) for c in pattern.children]
    assert mins_maxs == [(0, None), (1, None), (0, 1), (2, 2), (2, None),
                         (2, 4)]


def test_parse_dyncall_and_freq():
    ast = parse_query('[f(word)>10 & ishuman(word)]')
    expr = ast.pattern.expr
    assert expr == And(
        Compare(FreqCall(AttrRef("word")), ">", IntLiteral(10)),
        Truth(DynCall("ishuman", (AttrRef("word"),))))


def test_parse_bool_precedence():
    expr = parse_query('[!word="a" & pos="b" | num="c"]').pattern.expr
    # ! binds tighter than &, & tighter than |
    assert isinstance(expr, Or)
    assert isinstance(expr.lhs, And)
    assert isinstance(expr.lhs.lhs, Not)


def test_parse_error_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query('[word=]')
    assert err.value.line == 1
    assert err.value.col == 7


def test_parse_error_reports_expected():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query('"a" (')
    assert err.value.expected


def test_undefined_label_rejected():
    with pytest.raises(QuerySyntaxError):
        parse_query('[word=a.word] a:[pos="N.*"]')


def test_order_comparison_needs_integers():
    with pytest.raises(QuerySyntaxError):
        parse_query('[word > "a"]')
    with pytest.raises(QuerySyntaxError):
        parse_query('[pos < num]')


def test_string_escapes():
    expr = parse_query(r'"a\"b\\c"').pattern.expr
    assert expr.rhs == StringLiteral('a"b\\c')


def test_alternation_sugar_shape():
    ast = parse_query('("and" | "or")')
    assert isinstance(ast.pattern, Alternation)
    assert len(ast.pattern.children) == 2


@pytest.mark.parametrize("text", GOLDEN_QUERIES)
def test_print_parse_round_trip_goldens(text):
    ast = parse_query(text)
    assert parse_query(print_query(ast)) == ast


# -- randomized print/parse round trip ------------------------------------

_attr = st.sampled_from(["word", "pos", "num"])
_regex_text = st.text(alphabet="abN.*+?|", min_size=1, max_size=6)

_value_leaf = st.one_of(
    _attr.map(AttrRef),
    _regex_text.map(StringLiteral),
    st.integers(0, 99).map(IntLiteral))


def _conditions(labels):
    compare = st.builds(
        Compare, _attr.map(AttrRef),
        st.just("="), _regex_text.map(StringLiteral))
    int_compare = st.builds(
        Compare,
        st.builds(lambda a: FreqCall(AttrRef(a)), _attr),
        st.sampled_from(["<", "<=", ">", ">=", "=", "!="]),
        st.integers(0, 99).map(IntLiteral))
    label_compare = st.builds(
        Compare, _attr.map(AttrRef), st.sampled_from(["=", "!="]),
        st.sampled_from(sorted(labels)).map(
            lambda l: LabelPath(l, "word"))) if labels else st.nothing()
    atoms = [compare, int_compare]
    if labels:
        atoms.append(label_compare)
    atom = st.one_of(*atoms)
    return st.recursive(
        atom,
        lambda inner: st.one_of(
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
            st.builds(Not, inner)),
        max_leaves=4)


@st.composite
def patterns(draw, depth=0, labels=None):
    if labels is None:
        labels = set()
    choices = ["cond", "wild", "tag"]
    if depth < 3:
        choices += ["concat", "alt", "repeat"]
    kind = draw(st.sampled_from(choices))
    if kind == "cond":
        label = None
        if draw(st.booleans()):
            label = "l%d" % len(labels)
            labels.add(label)
        return Condition(draw(_conditions(labels - {label} if label
                                          else labels)), label)
    if kind == "wild":
        return Wildcard()
    if kind == "tag":
        return StructTag("s", draw(st.booleans()))
    if kind == "concat":
        children = tuple(draw(patterns(depth=depth + 1, labels=labels))
                         for _ in range(draw(st.integers(2, 3))))
        return Concat(children)
    if kind == "alt":
        children = tuple(draw(patterns(depth=depth + 1, labels=labels))
                         for _ in range(draw(st.integers(2, 3))))
        return Alternation(children)
    low = draw(st.integers(0, 3))
    high = draw(st.one_of(st.none(), st.integers(low, low + 3)))
    return Repeat(draw(patterns(depth=depth + 1, labels=labels)), low, high)


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_print_parse_round_trip_random(data):
    pattern = data.draw(patterns())
    within = data.draw(st.one_of(
        st.none(), st.tuples(st.integers(1, 3), st.just("s"))))
    ast = QueryAST(pattern, within)
    try:
        printed = print_query(ast)
    except Exception:
        pytest.skip("unprintable AST")
    reparsed = parse_query(printed)
    assert reparsed == ast
