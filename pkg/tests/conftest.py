import os
import stat
import textwrap

import pytest

from cqk import encoder, registry

TINY_VRT = textwrap.dedent("""\
    <s>
    the\tDT
    cat\tNN
    sat\tVBD
    </s>
    <s>
    the\tDT
    dogs\tNNS
    sat\tVBD
    </s>
    """)

TINY_F_VRT = textwrap.dedent("""\
    <s>
    le\tDT
    chat\tNN
    dormait\tVBD
    </s>
    <s>
    les\tDT
    chiens\tNNS
    dormaient\tVBD
    </s>
    """)

ISSHORT_SCRIPT = """\
#!/bin/sh
# emit 1 when the argument is at most 3 characters long
word="$1"
if [ "${#word}" -le 3 ]; then echo 1; else echo 0; fi
"""

ISHUMAN_SCRIPT = """\
#!/bin/sh
# tiny stand-in for a thesaurus lookup: is the word a human noun?
case "$1" in
    president|man|men|killer) echo 1 ;;
    *) echo 0 ;;
esac
"""

# 50 tokens, 7 sentences, attributes word/pos/num; exercises all the
# published query shapes (conjunction sugar, dynamic attributes,
# frequency, boundary tags, within, label references).  The last two
# sentences pair a lone "president" with a final-sentence
# "president ... said" so the within constraint has both a satisfied
# and a two-sentence case.
_GOLDEN_ROWS = [
    # s0: 0-7
    ("The", "DT", "sg"), ("president", "NN", "sg"), ("said", "VBD", "sg"),
    ("that", "IN", "sg"), ("he", "PRP", "sg"), ("would", "MD", "sg"),
    ("win", "VB", "sg"), (".", "SENT", "sg"),
    # s1: 8-17
    ("Big", "JJ", "pl"), ("dogs", "NNS", "pl"), ("and", "CC", "pl"),
    ("cats", "NNS", "pl"), ("of", "IN", "pl"), ("war", "NN", "sg"),
    ("kill", "VB", "pl"), ("a", "DT", "sg"), ("man", "NN", "sg"),
    (".", "SENT", "sg"),
    # s2: 18-26
    ("They", "PRP", "pl"), ("said", "VBD", "sg"), ("the", "DT", "pl"),
    ("old", "JJ", "pl"), ("men", "NNS", "pl"), ("love", "VBP", "pl"),
    ("the", "DT", "sg"), ("president", "NN", "sg"), (".", "SENT", "sg"),
    # s3: 27-35
    ("a", "DT", "sg"), ("dog", "NN", "sg"), ("saw", "VBD", "sg"),
    ("a", "DT", "sg"), ("dog", "NN", "sg"), ("near", "IN", "sg"),
    ("a", "DT", "sg"), ("dog", "NN", "sg"), (".", "SENT", "sg"),
    # s4: 36-40
    ("Everyone", "NN", "sg"), ("loves", "VBZ", "sg"), ("a", "DT", "sg"),
    ("killer", "NN", "sg"), (".", "SENT", "sg"),
    # s5: 41-44
    ("The", "DT", "sg"), ("president", "NN", "sg"),
    ("smiled", "VBD", "sg"), (".", "SENT", "sg"),
    # s6: 45-49
    ("The", "DT", "sg"), ("president", "NN", "sg"), ("said", "VBD", "sg"),
    ("yes", "UH", "sg"), (".", "SENT", "sg"),
]

_GOLDEN_SENTENCES = [(0, 7), (8, 17), (18, 26), (27, 35), (36, 40),
                     (41, 44), (45, 49)]


def golden_vrt():
    lines = []
    boundaries = dict(_GOLDEN_SENTENCES)
    for pos, row in enumerate(_GOLDEN_ROWS):
        if pos in boundaries:
            lines.append("<s>")
        lines.append("\t".join(row))
        if pos in {end for _, end in _GOLDEN_SENTENCES}:
            lines.append("</s>")
    return "\n".join(lines) + "\n"


def write_stub(path, body=ISSHORT_SCRIPT):
    path.write_text(body)
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def encode_corpus(home, vrt_text, positional=("word", "pos"),
                  structural=("s",), bigram_windows=(), attrs_bigram="word"):
    home = str(home)
    encoder.encode(vrt_text, list(positional), list(structural), home)
    for name in positional:
        encoder.build_inverted_index(home, name)
    for window in bigram_windows:
        encoder.build_bigram_table(home, attrs_bigram, window)
    return home


@pytest.fixture(scope="session")
def fixture_dirs(tmp_path_factory):
    """Encode tiny + tiny-f, write registries and the isshort stub.

    Returns (registry_dir, tiny_home, tiny_f_home, stub_path).
    """
    root = tmp_path_factory.mktemp("fixtures")
    tiny_home = root / "tiny"
    tiny_f_home = root / "tiny-f"
    encode_corpus(tiny_home, TINY_VRT, bigram_windows=(1, 2))
    encoder.build_bigram_table(str(tiny_home), "pos", 1)
    encode_corpus(tiny_f_home, TINY_F_VRT)
    encoder.write_alignment(str(tiny_home), "tiny-f", [(0, 0), (1, 1)])

    stub = write_stub(root / "isshort.sh")
    reg_dir = root / "registry"
    reg_dir.mkdir()
    (reg_dir / "tiny").write_text(textwrap.dedent("""\
        NAME "Tiny fixture corpus"
        ID tiny
        HOME %s
        ATTRIBUTE word
        ATTRIBUTE pos
        STRUCTURE s
        DYNAMIC isshort(String):INT "%s '$1'"
        ALIGNED tiny-f
        """) % (tiny_home, stub))
    (reg_dir / "tiny-f").write_text(textwrap.dedent("""\
        ID tiny-f
        HOME %s
        ATTRIBUTE word
        ATTRIBUTE pos
        STRUCTURE s
        """) % tiny_f_home)

    golden_home = root / "golden"
    encode_corpus(golden_home, golden_vrt(),
                  positional=("word", "pos", "num"))
    ishuman = write_stub(root / "ishuman.sh", ISHUMAN_SCRIPT)
    (reg_dir / "golden").write_text(textwrap.dedent("""\
        ID golden
        HOME %s
        ATTRIBUTE word
        ATTRIBUTE pos
        ATTRIBUTE num
        STRUCTURE s
        DYNAMIC ishuman(String):INT "%s '$1'"
        """) % (golden_home, ishuman))
    return str(reg_dir), str(tiny_home), str(tiny_f_home), stub


@pytest.fixture
def golden(registry_dir):
    _, corpus = registry.resolve_corpus("golden")
    return corpus


@pytest.fixture
def registry_dir(fixture_dirs, monkeypatch):
    reg_dir = fixture_dirs[0]
    monkeypatch.setenv(registry.SEARCH_PATH_VAR, reg_dir)
    return reg_dir


@pytest.fixture
def tiny(registry_dir):
    _, corpus = registry.resolve_corpus("tiny")
    return corpus


@pytest.fixture
def tiny_f(registry_dir):
    _, corpus = registry.resolve_corpus("tiny-f")
    return corpus
