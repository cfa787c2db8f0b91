"""Encode vertical-format text into the binary corpus representation.

Input is pre-tokenized: one token per line, TAB-separated attribute
columns, and bare structural markers ``<name>`` / ``</name>`` that do
not consume token positions.  Attributes can be added to an encoded
corpus later without touching any existing file.
"""

import os
import re

from . import binio
from .errors import VerticalFormatError

_MARKER = re.compile(r"^</?([A-Za-z_][A-Za-z0-9_-]*)>$")


def parse_vertical(text, n_columns, structural_names):
    """Parse vertical text into a token matrix and region lists.

    Returns ``(rows, regions)`` where rows is a list of column tuples
    and regions maps each structural name to its (start, end) list.
    """
    rows = []
    open_regions = {}
    regions = {name: [] for name in structural_names}
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.replace("\r", "")
        if line == "":
            continue
        marker = _MARKER.match(line)
        if marker:
            name = marker.group(1)
            if name not in regions:
                raise VerticalFormatError(
                    "marker %r does not name a declared structural attribute"
                    % line, lineno)
            closing = line.startswith("</")
            if closing:
                if name not in open_regions:
                    raise VerticalFormatError(
                        "unmatched closing marker %r" % line, lineno)
                start = open_regions.pop(name)
                if start >= len(rows):
                    raise VerticalFormatError(
                        "empty region %r" % name, lineno)
                regions[name].append((start, len(rows) - 1))
            else:
                if name in open_regions:
                    raise VerticalFormatError(
                        "nested marker %r" % line, lineno)
                open_regions[name] = len(rows)
            continue
        columns = line.split("\t")
        if len(columns) != n_columns:
            raise VerticalFormatError(
                "expected %d column(s), found %d" % (n_columns, len(columns)),
                lineno)
        rows.append(tuple(columns))
    if open_regions:
        raise VerticalFormatError(
            "unclosed marker(s): %s" % ", ".join(sorted(open_regions)))
    return rows, regions


def _write_positional(home, name, values):
    """Write .lex/.lexidx/.tok for one column of per-position values.

    Value ids are assigned in order of first occurrence.  Lexicon index
    entries are absolute byte offsets into the .lex file.
    """
    lexicon = []
    ids = {}
    stream = []
    for value in values:
        vid = ids.get(value)
        if vid is None:
            vid = len(lexicon)
            ids[value] = vid
            lexicon.append(value)
        stream.append(vid)
    lex_payload = bytearray()
    offsets = []
    for entry in lexicon:
        offsets.append(binio.HEADER_LEN + len(lex_payload))
        lex_payload += entry.encode("utf-8") + b"\x00"
    binio.write_payload(os.path.join(home, name + ".lex"),
                        binio.TYPE_LEX, bytes(lex_payload))
    binio.write_payload(os.path.join(home, name + ".lexidx"),
                        binio.TYPE_LEXIDX, binio.pack_u32s(offsets))
    binio.write_payload(os.path.join(home, name + ".tok"),
                        binio.TYPE_TOK, binio.pack_u32s(stream))


def encode(text, positional_names, structural_names, home):
    """Encode a vertical document; returns the corpus size in tokens."""
    if "word" not in positional_names:
        raise VerticalFormatError("positional attributes must include 'word'")
    rows, regions = parse_vertical(text, len(positional_names),
                                   structural_names)
    os.makedirs(home, exist_ok=True)
    for col, name in enumerate(positional_names):
        _write_positional(home, name, [row[col] for row in rows])
    for name in structural_names:
        flat = []
        for start, end in regions[name]:
            flat += [start, end]
        binio.write_payload(os.path.join(home, name + ".rng"),
                            binio.TYPE_RNG, binio.pack_u32s(flat))
    return len(rows)


def decode(home, positional_names, structural_names):
    """Read back the token matrix and region lists of an encoded corpus."""
    from .corpus import load_positional, load_regions
    attrs = [load_positional(home, name) for name in positional_names]
    size = attrs[0].size if attrs else 0
    rows = [tuple(a.value_at(pos) for a in attrs) for pos in range(size)]
    regions = {name: load_regions(home, name).regions
               for name in structural_names}
    return rows, regions


def build_inverted_index(home, attr_name):
    """Write .inv/.invidx for an encoded positional attribute."""
    from .corpus import load_positional
    attr = load_positional(home, attr_name)
    flat = []
    index = []
    for vid in range(attr.lexicon_size):
        positions = attr.inverted[vid]
        index += [len(flat), len(positions)]
        flat += positions
    binio.write_payload(os.path.join(home, attr_name + ".inv"),
                        binio.TYPE_INV, binio.pack_u32s(flat))
    binio.write_payload(os.path.join(home, attr_name + ".invidx"),
                        binio.TYPE_INVIDX, binio.pack_u32s(index))


def build_bigram_table(home, attr_name, window):
    """Count value-id pairs at token distance 1..window and write the
    .w<window>.bgr file.  Pairs may span structural boundaries."""
    if window < 1:
        raise VerticalFormatError("bigram window must be >= 1")
    from .corpus import load_positional
    attr = load_positional(home, attr_name)
    counts = {}
    stream = attr.stream
    for p, id1 in enumerate(stream):
        for q in range(p + 1, min(p + window, len(stream) - 1) + 1):
            pair = (id1, stream[q])
            counts[pair] = counts.get(pair, 0) + 1
    flat = [window]
    for (id1, id2) in sorted(counts):
        flat += [id1, id2, counts[(id1, id2)]]
    binio.write_payload(
        os.path.join(home, "%s.w%d.bgr" % (attr_name, window)),
        binio.TYPE_BGR, binio.pack_u32s(flat))


def add_positional_attribute(home, attr_name, column):
    """Add one attribute to an encoded corpus without reindexing.

    Only the new attribute's files are written; every preexisting file
    stays byte-identical.
    """
    from .corpus import load_positional
    size = load_positional(home, "word").size
    if len(column) != size:
        raise VerticalFormatError(
            "column has %d value(s) but corpus size is %d"
            % (len(column), size))
    _write_positional(home, attr_name, column)
    build_inverted_index(home, attr_name)


def write_alignment(home, target_id, pairs):
    """Write region alignment pairs towards a target corpus."""
    flat = []
    for src, tgt in sorted(pairs):
        flat += [src, tgt]
    binio.write_payload(os.path.join(home, target_id + ".alg"),
                        binio.TYPE_ALG, binio.pack_u32s(flat))
