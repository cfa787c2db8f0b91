"""Key-word-in-context rendering of query results.

A KWIC line holds the match tokens plus left/right context, either a
fixed number of tokens per side or the containing region of a
structural attribute.  Aligned display pairs each match's source
region text (match in angle brackets) with the aligned target text.
"""

from dataclasses import dataclass
from typing import Optional

from .errors import CqkError, NotAlignedError, UnknownAttributeError
from .queryeval import MatchSet


@dataclass
class KwicLine:
    interval: tuple
    left: list    # rendered token strings, one per position
    match: list
    right: list
    region_index: Optional[int] = None

    def render(self):
        parts = []
        if self.left:
            parts.append(" ".join(self.left))
        parts.append("<" + " ".join(self.match) + ">")
        if self.right:
            parts.append(" ".join(self.right))
        return " ".join(parts)


def _token(corpus, pos, show_attrs):
    return "/".join(corpus.value_at(name, pos) for name in show_attrs)


def kwic_lines(result, corpus, context=5, show_attrs=("word",)):
    """One KwicLine per interval, in MatchSet order.

    ``context`` is a token count per side, or a structural attribute
    name to clip the context at the containing region.
    """
    for name in show_attrs:
        if name not in corpus.positional:
            raise UnknownAttributeError("unknown attribute %r" % name)
    structural = isinstance(context, str)
    if structural:
        regions = corpus.regions(context)
    elif context < 0:
        raise CqkError("context must be >= 0")
    lines = []
    for start, end in result.intervals:
        region_index = None
        if structural:
            region_index = regions.containing(start)
            if region_index is not None:
                lo, hi = regions.bounds(region_index)
                lo = max(lo, 0)
                hi = min(hi, corpus.size - 1)
            else:
                lo, hi = start, end
        else:
            lo = max(start - context, 0)
            hi = min(end + context, corpus.size - 1)
        line = KwicLine(
            interval=(start, end),
            left=[_token(corpus, p, show_attrs) for p in range(lo, start)],
            match=[_token(corpus, p, show_attrs)
                   for p in range(start, end + 1)],
            right=[_token(corpus, p, show_attrs)
                   for p in range(end + 1, hi + 1)],
            region_index=region_index)
        lines.append(line)
    return lines


SORT_KEYS = ("match", "left-context", "right-context", "position")


def sort_lines(lines, key="match"):
    """Stable sort permutation over KWIC lines.

    Left context compares tokens right-to-left from the match, the
    standard concordance convention.  Ties keep corpus-position order.
    """
    if key == "position":
        return list(range(len(lines)))
    if key == "match":
        def sort_key(i):
            return tuple(lines[i].match)
    elif key == "left-context":
        def sort_key(i):
            return tuple(reversed(lines[i].left))
    elif key == "right-context":
        def sort_key(i):
            return tuple(lines[i].right)
    else:
        raise ValueError("unknown sort key %r" % key)
    return sorted(range(len(lines)), key=sort_key)


def delete_lines(result, indices):
    """Drop the intervals at the given MatchSet indices."""
    n = len(result.intervals)
    drop = set()
    for i in indices:
        if not 0 <= i < n:
            raise IndexError("line index %d out of range (%d lines)"
                             % (i, n))
        drop.add(i)
    kept = [iv for i, iv in enumerate(result.intervals) if i not in drop]
    return MatchSet(result.corpus_id, tuple(kept))


def export_text(lines, path):
    """Write rendered KWIC lines to a UTF-8 text file."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line.render() + "\n")


def aligned_lines(result, corpus, target_corpus):
    """Pair each match's source-region text (match angle-bracketed)
    with the text of the aligned target range."""
    if corpus.alignment is None:
        raise NotAlignedError("corpus %r is not aligned" % corpus.id)
    regions = corpus.regions(corpus.alignment.source_structural)
    out = []
    for start, end in result.intervals:
        indices = regions.overlapping(start, end)
        if indices:
            lo = regions.bounds(indices[0])[0]
            hi = regions.bounds(indices[-1])[1]
        else:
            lo, hi = start, end
        words = []
        for pos in range(lo, hi + 1):
            token = corpus.value_at("word", pos)
            if pos == start:
                token = "<" + token
            if pos == end:
                token = token + ">"
            words.append(token)
        source_text = " ".join(words)
        target_range = corpus.aligned_range((start, end), target_corpus)
        if target_range is None:
            target_text = "(unaligned)"
        else:
            target_text = " ".join(
                target_corpus.value_at("word", pos)
                for pos in range(target_range[0], target_range[1] + 1))
        out.append((source_text, target_text))
    return out
