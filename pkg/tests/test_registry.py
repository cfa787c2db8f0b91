import textwrap

import pytest
from hypothesis import given, settings, strategies as st

from cqk import registry
from cqk.corpus import DynamicAttributeDecl
from cqk.errors import RegistryError

FIGURE_REGISTRY = textwrap.dedent("""\
    NAME "Hansard corpus (english part)"
    ID      hansard-e
    HOME /corpora/encoded/hansard-e

    ATTRIBUTE word
    ATTRIBUTE pos

    DYNAMIC ishuman(String):INT "/corpora/utils/cmd/wn-hypen '$1' human"

    ALIGNED hansard-f          # the french part
    """)


def test_parse_sample_registry():
    decl = registry.parse_registry(FIGURE_REGISTRY)
    assert decl.id == "hansard-e"
    assert decl.display_name == "Hansard corpus (english part)"
    assert decl.home == "/corpora/encoded/hansard-e"
    assert decl.positional == [("word", None), ("pos", None)]
    assert decl.structural == []
    assert decl.dynamic == [DynamicAttributeDecl(
        "ishuman", ("String",), "INT",
        "/corpora/utils/cmd/wn-hypen '$1' human")]
    assert decl.aligned_to == "hansard-f"


def test_parse_minimal():
    decl = registry.parse_registry("ID x\nHOME /tmp/x\nATTRIBUTE word\n")
    assert decl.id == "x"
    assert decl.positional == [("word", None)]
    assert decl.structural == [] and decl.dynamic == []
    assert decl.aligned_to is None and decl.display_name is None


def test_parse_duplicate_home():
    with pytest.raises(RegistryError):
        registry.parse_registry("ID x\nHOME /a\nHOME /b\n")


def test_parse_duplicate_id():
    with pytest.raises(RegistryError):
        registry.parse_registry("ID x\nID y\nHOME /a\n")


def test_parse_unknown_keyword():
    with pytest.raises(RegistryError):
        registry.parse_registry("ID x\nHOME /a\nFROBNICATE yes\n")


def test_parse_malformed_dynamic():
    with pytest.raises(RegistryError):
        registry.parse_registry(
            'ID x\nHOME /a\nDYNAMIC broken(Str):INT "cmd"\n')


def test_parse_remote_attribute():
    decl = registry.parse_registry(
        "ID x\nHOME /a\nATTRIBUTE word\n"
        "ATTRIBUTE pos REMOTE corpus.example.org:7700\n")
    assert decl.positional[1] == ("pos", ("corpus.example.org", 7700))


def test_comments_and_whitespace_insensitive():
    base = registry.parse_registry("ID x\nHOME /a\nATTRIBUTE word\n")
    noisy = registry.parse_registry(
        "# header comment\n  ID   x  # trailing\n\nHOME    /a\n"
        "ATTRIBUTE\tword\n")
    assert noisy == base


def test_serialize_round_trip_sample():
    decl = registry.parse_registry(FIGURE_REGISTRY)
    assert registry.parse_registry(registry.serialize_registry(decl)) == decl


def test_serialize_structure_and_remote():
    decl = registry.RegistryDecl(
        id="x", home="/a",
        positional=[("word", None), ("pos", ("host", 9))],
        structural=["s"])
    text = registry.serialize_registry(decl)
    assert "STRUCTURE s" in text
    assert "ATTRIBUTE pos REMOTE host:9" in text
    assert registry.parse_registry(text) == decl


def test_resolve_corpus(registry_dir):
    decl, corpus = registry.resolve_corpus("tiny")
    assert corpus.size == 6
    assert decl.id == "tiny"


def test_resolve_not_found(registry_dir):
    with pytest.raises(RegistryError) as err:
        registry.resolve_corpus("nosuch")
    assert registry_dir in str(err.value)


# -- parse/serialize identity over random declarations --------------------

_name = st.from_regex(r"[A-Za-z_][A-Za-z0-9_-]{0,6}", fullmatch=True)
_id = st.from_regex(r"[a-z0-9-]{1,8}", fullmatch=True)
_display = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",),
                           blacklist_characters='"\n\r\x00#'),
    max_size=20)
_command = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",),
                           blacklist_characters='"\n\r\x00$'),
    min_size=1, max_size=30)


@st.composite
def declarations(draw):
    positional = draw(st.lists(_name, min_size=1, max_size=4,
                               unique_by=str.lower))
    taken = set(positional)
    structural = draw(st.lists(
        _name.filter(lambda n: n not in taken), max_size=2, unique=True))
    taken |= set(structural)
    dynamic = []
    for dyn_name in draw(st.lists(
            _name.filter(lambda n: n not in taken), max_size=2,
            unique=True)):
        arg_types = tuple(draw(st.lists(
            st.sampled_from(["String", "Int"]), min_size=1, max_size=3)))
        dynamic.append(DynamicAttributeDecl(
            dyn_name, arg_types,
            draw(st.sampled_from(["STRING", "INT"])), draw(_command)))
    remote = [draw(st.one_of(
        st.none(), st.tuples(st.just("localhost"),
                             st.integers(1, 65535))))
        for _ in positional]
    return registry.RegistryDecl(
        id=draw(_id), home="/data/" + draw(_id),
        display_name=draw(st.one_of(st.none(), _display)),
        positional=list(zip(positional, remote)),
        structural=structural, dynamic=dynamic,
        aligned_to=draw(st.one_of(st.none(), _id)))


@settings(max_examples=150, deadline=None)
@given(decl=declarations())
def test_parse_serialize_identity(decl):
    assert registry.parse_registry(registry.serialize_registry(decl)) == decl
