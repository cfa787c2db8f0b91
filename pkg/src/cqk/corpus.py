"""Physical layer: uniform access to encoded corpus data.

A loaded :class:`Corpus` is immutable; every read operation is safe to
call concurrently.  Dynamic attributes spawn external processes and are
slow by nature; query evaluation caches them per query (see queryeval).
"""

import bisect
import glob
import os
import re
import shlex
import subprocess
from dataclasses import dataclass, field

from . import binio
from .errors import (CorpusFormatError, DynamicEvalError, NotAlignedError,
                     PositionRangeError, UnknownAttributeError)


class PositionalAttribute:
    """A lexicon, per-position id stream and inverted index for one
    positional attribute, fully loaded in memory."""

    def __init__(self, name, lexicon, stream, inverted=None):
        self.name = name
        self.lexicon = list(lexicon)
        self.stream = list(stream)
        self._ids = {value: i for i, value in enumerate(self.lexicon)}
        if len(self._ids) != len(self.lexicon):
            raise CorpusFormatError(
                "attribute %r: duplicate lexicon entries" % name)
        if inverted is None:
            inverted = [[] for _ in self.lexicon]
            for pos, vid in enumerate(self.stream):
                inverted[vid].append(pos)
        self.inverted = inverted

    @property
    def size(self):
        return len(self.stream)

    @property
    def lexicon_size(self):
        return len(self.lexicon)

    def id_at(self, pos):
        self._check_pos(pos)
        return self.stream[pos]

    def value_at(self, pos):
        return self.lexicon[self.id_at(pos)]

    def id_to_str(self, vid):
        self._check_id(vid)
        return self.lexicon[vid]

    def str_to_id(self, value):
        """Return the value id for ``value`` or None when absent."""
        return self._ids.get(value)

    def positions_of(self, vid):
        self._check_id(vid)
        return list(self.inverted[vid])

    def freq(self, vid):
        self._check_id(vid)
        return len(self.inverted[vid])

    def _check_pos(self, pos):
        if not 0 <= pos < len(self.stream):
            raise PositionRangeError(
                "attribute %r: position %d out of range (size %d)"
                % (self.name, pos, len(self.stream)))

    def _check_id(self, vid):
        if not 0 <= vid < len(self.lexicon):
            raise PositionRangeError(
                "attribute %r: value id %d out of range (lexicon size %d)"
                % (self.name, vid, len(self.lexicon)))


class StructuralRegions:
    """Sorted, non-overlapping, non-recursive [start,end] token intervals."""

    def __init__(self, name, regions):
        self.name = name
        self.regions = [(int(s), int(e)) for s, e in regions]
        last_end = -1
        for s, e in self.regions:
            if s > e:
                raise CorpusFormatError(
                    "region %r: start %d > end %d" % (name, s, e))
            if s <= last_end:
                raise CorpusFormatError(
                    "region %r: overlapping or unsorted regions" % name)
            last_end = e
        self._starts = [s for s, _ in self.regions]

    def __len__(self):
        return len(self.regions)

    def containing(self, pos):
        """Index of the region containing ``pos``, or None."""
        i = bisect.bisect_right(self._starts, pos) - 1
        if i >= 0 and self.regions[i][0] <= pos <= self.regions[i][1]:
            return i
        return None

    def bounds(self, index):
        return self.regions[index]

    def overlapping(self, start, end):
        """Indices of regions intersecting [start, end]."""
        out = []
        i = bisect.bisect_right(self._starts, end) - 1
        while i >= 0 and self.regions[i][1] >= start:
            out.append(i)
            i -= 1
        out.reverse()
        return out


class BigramTable:
    """Co-occurrence counts of value-id pairs of one positional
    attribute within a token window (pair distance 1..window)."""

    def __init__(self, attribute, window, counts):
        if window < 1:
            raise CorpusFormatError("bigram window must be >= 1")
        self.attribute = attribute
        self.window = window
        self.counts = dict(counts)

    def count(self, id1, id2):
        return self.counts.get((id1, id2), 0)


_PLACEHOLDER = re.compile(r"'\$(\d+)'|\$(\d+)")

STRING = "String"
INT = "Int"


@dataclass(frozen=True)
class DynamicAttributeDecl:
    """Declaration of an externally computed attribute."""

    name: str
    arg_types: tuple
    return_type: str  # "STRING" or "INT"
    command: str

    def __post_init__(self):
        arity = len(self.arg_types)
        for match in _PLACEHOLDER.finditer(self.command):
            n = int(match.group(1) or match.group(2))
            if not 1 <= n <= arity:
                raise CorpusFormatError(
                    "dynamic attribute %r: placeholder $%d exceeds arity %d"
                    % (self.name, n, arity))


def eval_dynamic(decl, args):
    """Run the external command behind ``decl`` with ``args`` substituted.

    Arguments are shell-quoted before substitution so corpus tokens can
    never inject shell syntax.  Only the first line of standard output
    is consumed; it is parsed as an integer for INT-returning attributes.
    """
    if len(args) != len(decl.arg_types):
        raise DynamicEvalError(
            decl.name, "expected %d argument(s), got %d"
            % (len(decl.arg_types), len(args)))
    for arg, kind in zip(args, decl.arg_types):
        if kind == INT and not isinstance(arg, int):
            raise DynamicEvalError(
                decl.name, "argument %r is not an integer" % (arg,))

    def substitute(match):
        n = int(match.group(1) or match.group(2))
        return shlex.quote(str(args[n - 1]))

    command = _PLACEHOLDER.sub(substitute, decl.command)
    try:
        proc = subprocess.run(command, shell=True, capture_output=True,
                              text=True)
    except OSError as exc:
        raise DynamicEvalError(decl.name, "cannot launch: %s" % exc) from exc
    if proc.returncode != 0:
        raise DynamicEvalError(
            decl.name, "command exited with status %d" % proc.returncode)
    value = proc.stdout.splitlines()[0].strip() if proc.stdout else ""
    if decl.return_type == "INT":
        try:
            return int(value)
        except ValueError:
            raise DynamicEvalError(
                decl.name, "output %r is not an integer" % value) from None
    return value


@dataclass
class AlignmentMap:
    """Single-level region alignment towards a target corpus."""

    source_structural: str
    pairs: list  # (source-region-index, target-region-index), sorted

    def __post_init__(self):
        self._targets = dict(self.pairs)
        if len(self._targets) != len(self.pairs):
            raise CorpusFormatError("alignment: duplicate source regions")

    def target_of(self, source_index):
        return self._targets.get(source_index)


@dataclass
class Corpus:
    """An immutable loaded corpus with all its declared attributes."""

    id: str
    positional: dict = field(default_factory=dict)
    structural: dict = field(default_factory=dict)
    dynamic: dict = field(default_factory=dict)
    bigrams: dict = field(default_factory=dict)  # (attr, window) -> table
    alignment: AlignmentMap = None
    aligned_to: str = None

    def __post_init__(self):
        if "word" not in self.positional:
            raise CorpusFormatError(
                "corpus %r has no 'word' attribute" % self.id)
        sizes = {a.size for a in self.positional.values()}
        if len(sizes) > 1:
            raise CorpusFormatError(
                "corpus %r: positional attributes disagree on size" % self.id)
        seen = set()
        for name in (list(self.positional) + list(self.structural)
                     + list(self.dynamic)):
            if name in seen:
                raise CorpusFormatError(
                    "corpus %r: attribute name %r not unique" % (self.id, name))
            seen.add(name)

    @property
    def size(self):
        return self.positional["word"].size

    def attr(self, name):
        try:
            return self.positional[name]
        except KeyError:
            raise UnknownAttributeError(
                "corpus %r has no positional attribute %r"
                % (self.id, name)) from None

    def regions(self, name):
        try:
            return self.structural[name]
        except KeyError:
            raise UnknownAttributeError(
                "corpus %r has no structural attribute %r"
                % (self.id, name)) from None

    # -- positional access ------------------------------------------------

    def value_at(self, attr_name, pos):
        return self.attr(attr_name).value_at(pos)

    def str_to_id(self, attr_name, value):
        return self.attr(attr_name).str_to_id(value)

    def positions_of(self, attr_name, vid):
        return self.attr(attr_name).positions_of(vid)

    def freq(self, attr_name, vid):
        return self.attr(attr_name).freq(vid)

    # -- structural access ------------------------------------------------

    def region_containing(self, struct_name, pos):
        if not 0 <= pos < self.size:
            raise PositionRangeError(
                "position %d out of range (size %d)" % (pos, self.size))
        return self.regions(struct_name).containing(pos)

    # -- bigrams ----------------------------------------------------------

    def bigram_count(self, attr_name, id1, id2, window=1):
        attr = self.attr(attr_name)
        attr._check_id(id1)
        attr._check_id(id2)
        table = self.bigrams.get((attr_name, window))
        if table is None:
            raise UnknownAttributeError(
                "no bigram table for attribute %r, window %d"
                % (attr_name, window))
        return table.count(id1, id2)

    # -- alignment --------------------------------------------------------

    def aligned_range(self, interval, target_corpus):
        """Map a source interval to the convex hull of the aligned
        target regions, or None when no overlapping region is aligned."""
        if self.alignment is None:
            raise NotAlignedError("corpus %r is not aligned" % self.id)
        source = self.regions(self.alignment.source_structural)
        target = target_corpus.regions(self.alignment.source_structural)
        start, end = interval
        bounds = []
        for idx in source.overlapping(start, end):
            tgt = self.alignment.target_of(idx)
            if tgt is not None:
                bounds.append(target.bounds(tgt))
        if not bounds:
            return None
        return (min(b[0] for b in bounds), max(b[1] for b in bounds))


# -- loading an encoded corpus from its home directory --------------------

def load_positional(home, name):
    lex = binio.read_payload(os.path.join(home, name + ".lex"),
                             binio.TYPE_LEX)
    lexidx_path = os.path.join(home, name + ".lexidx")
    offsets = binio.unpack_u32s(
        binio.read_payload(lexidx_path, binio.TYPE_LEXIDX), lexidx_path)
    lexicon = []
    for off in offsets:
        start = off - binio.HEADER_LEN
        end = lex.index(b"\x00", start)
        lexicon.append(lex[start:end].decode("utf-8"))
    tok_path = os.path.join(home, name + ".tok")
    stream = binio.unpack_u32s(
        binio.read_payload(tok_path, binio.TYPE_TOK), tok_path)

    inverted = None
    inv_path = os.path.join(home, name + ".inv")
    invidx_path = os.path.join(home, name + ".invidx")
    if os.path.exists(inv_path) and os.path.exists(invidx_path):
        flat = binio.unpack_u32s(
            binio.read_payload(inv_path, binio.TYPE_INV), inv_path)
        idx = binio.unpack_u32s(
            binio.read_payload(invidx_path, binio.TYPE_INVIDX), invidx_path)
        inverted = []
        for i in range(0, len(idx), 2):
            off, count = idx[i], idx[i + 1]
            inverted.append(list(flat[off:off + count]))
    return PositionalAttribute(name, lexicon, stream, inverted)


def load_regions(home, name):
    path = os.path.join(home, name + ".rng")
    flat = binio.unpack_u32s(binio.read_payload(path, binio.TYPE_RNG), path)
    return StructuralRegions(name, list(zip(flat[0::2], flat[1::2])))


def load_bigrams(home, attr_name):
    """All bigram tables stored for one attribute, keyed by window."""
    tables = {}
    for path in glob.glob(os.path.join(home, glob.escape(attr_name) + ".w*.bgr")):
        flat = binio.unpack_u32s(binio.read_payload(path, binio.TYPE_BGR),
                                 path)
        window = flat[0]
        counts = {}
        for i in range(1, len(flat), 3):
            counts[(flat[i], flat[i + 1])] = flat[i + 2]
        tables[window] = BigramTable(attr_name, window, counts)
    return tables


def load_alignment(home, target_id, source_structural="s"):
    path = os.path.join(home, target_id + ".alg")
    if not os.path.exists(path):
        return None
    flat = binio.unpack_u32s(binio.read_payload(path, binio.TYPE_ALG), path)
    return AlignmentMap(source_structural, list(zip(flat[0::2], flat[1::2])))
