import pytest

from cqk.errors import NotAlignedError, UnknownAttributeError
from cqk.kwic import (aligned_lines, delete_lines, export_text, kwic_lines,
                      sort_lines)
from cqk.queryeval import MatchSet, run_query


def test_kwic_token_context(tiny):
    result = run_query('[pos="NN.*"]', tiny)
    lines = kwic_lines(result, tiny, context=1)
    assert [l.render() for l in lines] == [
        "the <cat> sat",
        "the <dogs> sat",
    ]


def test_kwic_wide_context_clipped_at_corpus_edge(tiny):
    lines = kwic_lines(run_query('"cat"', tiny), tiny, context=5)
    assert lines[0].render() == "the <cat> sat the dogs sat"
    assert lines[0].left == ["the"]


def test_kwic_zero_context(tiny):
    lines = kwic_lines(run_query('"the" []?', tiny), tiny, context=0)
    assert [l.render() for l in lines] == ["<the cat>", "<the dogs>"]


def test_kwic_structural_context(tiny):
    lines = kwic_lines(run_query('[pos="NN.*"]', tiny), tiny, context="s")
    assert [l.render() for l in lines] == [
        "the <cat> sat",
        "the <dogs> sat",
    ]
    assert [l.region_index for l in lines] == [0, 1]


def test_kwic_show_attrs(tiny):
    lines = kwic_lines(run_query('"cat"', tiny), tiny, context=1,
                       show_attrs=("word", "pos"))
    assert lines[0].render() == "the/DT <cat/NN> sat/VBD"


def test_kwic_unknown_attr(tiny):
    with pytest.raises(UnknownAttributeError):
        kwic_lines(run_query('"cat"', tiny), tiny, show_attrs=("lemma",))


def test_kwic_interval_order_matches_result(golden):
    result = run_query('[word="a"]', golden)
    lines = kwic_lines(result, golden, context=0)
    assert [l.interval for l in lines] == list(result.intervals)


def test_sort_by_match(golden):
    result = run_query('[pos="N.*"]', golden)
    lines = kwic_lines(result, golden, context=2)
    order = sort_lines(lines, "match")
    matches = [" ".join(lines[i].match) for i in order]
    assert matches == sorted(matches)


def test_sort_left_context_compares_right_to_left(golden):
    result = run_query('"dog"', golden)
    lines = kwic_lines(result, golden, context=2)
    # all three matches are "dog"; left contexts end in "a", then
    # compare the token before it
    order = sort_lines(lines, "left-context")
    lefts = [tuple(reversed(lines[i].left)) for i in order]
    assert lefts == sorted(lefts)


def test_sort_is_stable_on_ties(golden):
    result = run_query('[word="a"] "dog"', golden)
    lines = kwic_lines(result, golden, context=0)
    assert sort_lines(lines, "match") == [0, 1, 2]
    assert sort_lines(lines, "position") == [0, 1, 2]


def test_sort_unknown_key(tiny):
    with pytest.raises(ValueError):
        sort_lines([], "middle")


def test_delete_lines(tiny):
    result = run_query('[pos="NN.*"]', tiny)
    kept = delete_lines(result, [0])
    assert kept == MatchSet.build("tiny", [(4, 4)])


def test_delete_all_lines_yields_empty(tiny):
    result = run_query('[pos="NN.*"]', tiny)
    assert delete_lines(result, [0, 1]) == MatchSet.build("tiny", [])


def test_delete_out_of_range(tiny):
    result = run_query('[pos="NN.*"]', tiny)
    with pytest.raises(IndexError):
        delete_lines(result, [2])
    with pytest.raises(IndexError):
        delete_lines(result, [-1])


def test_export_text_bytes(tiny, tmp_path):
    path = tmp_path / "kwic.txt"
    lines = kwic_lines(run_query('[pos="NN.*"]', tiny), tiny, context="s")
    export_text(lines, path)
    assert path.read_bytes() == b"the <cat> sat\nthe <dogs> sat\n"


def test_export_text_deterministic(golden, tmp_path):
    lines = kwic_lines(run_query('[pos="N.*"]', golden), golden, context=3)
    export_text(lines, tmp_path / "a.txt")
    export_text(lines, tmp_path / "b.txt")
    assert (tmp_path / "a.txt").read_bytes() == \
        (tmp_path / "b.txt").read_bytes()


def test_aligned_display(tiny, tiny_f):
    result = run_query('"cat"', tiny)
    pairs = aligned_lines(result, tiny, tiny_f)
    assert pairs == [("the <cat> sat", "le chat dormait")]


def test_aligned_display_second_sentence(tiny, tiny_f):
    pairs = aligned_lines(run_query('"dogs"', tiny), tiny, tiny_f)
    assert pairs == [("the <dogs> sat", "les chiens dormaient")]


def test_aligned_not_aligned(tiny_f):
    result = run_query('"chat"', tiny_f)
    with pytest.raises(NotAlignedError):
        aligned_lines(result, tiny_f, tiny_f)
