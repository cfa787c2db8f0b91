"""Persist, combine and reuse query results.

Result files are plain text so they can be inspected and diffed:

    cqk-result 1
    corpus tiny
    query [pos="NN.*"]
    1\t1
    4\t4

Set operations treat intervals as atomic elements: two results
intersect on identical intervals, overlaps are never merged.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import ResultError
from .queryeval import MatchSet

FORMAT_LINE = "cqk-result 1"


@dataclass
class NamedResult:
    name: str
    matchset: MatchSet
    query_text: Optional[str] = None
    created_at: float = field(default_factory=time.time)


def save_result(result, path):
    matchset = result.matchset if isinstance(result, NamedResult) else result
    query = result.query_text if isinstance(result, NamedResult) else None
    lines = [FORMAT_LINE, "corpus %s" % matchset.corpus_id]
    if query is not None:
        lines.append("query %s" % query.replace("\n", "\\n"))
    for start, end in matchset.intervals:
        lines.append("%d\t%d" % (start, end))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_result(path, name=None):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ResultError("cannot read %s: %s" % (path, exc)) from exc
    if not lines or lines[0] != FORMAT_LINE:
        raise ResultError("%s: not a cqk result file" % path)
    if len(lines) < 2 or not lines[1].startswith("corpus "):
        raise ResultError("%s: missing corpus line" % path)
    corpus_id = lines[1][len("corpus "):]
    query = None
    body = lines[2:]
    if body and body[0].startswith("query "):
        query = body[0][len("query "):].replace("\\n", "\n")
        body = body[1:]
    intervals = []
    for line in body:
        if not line:
            continue
        try:
            start, end = line.split("\t")
            intervals.append((int(start), int(end)))
        except ValueError:
            raise ResultError("%s: bad interval line %r" % (path, line)) \
                from None
    return NamedResult(name or path, MatchSet.build(corpus_id, intervals),
                       query)


def check_same_corpus(a, b):
    if a.corpus_id != b.corpus_id:
        raise ResultError("results belong to different corpora: %r vs %r"
                          % (a.corpus_id, b.corpus_id))


def set_op(kind, a, b):
    """union / intersection / difference on exact intervals."""
    check_same_corpus(a, b)
    sa, sb = set(a.intervals), set(b.intervals)
    if kind == "union":
        out = sa | sb
    elif kind == "intersection":
        out = sa & sb
    elif kind == "difference":
        out = sa - sb
    else:
        raise ValueError("unknown set operation %r" % kind)
    return MatchSet.build(a.corpus_id, out)


def as_subcorpus(matchset, corpus, expand=None):
    """Prepare a result for reuse as a subcorpus.

    With ``expand``, every interval is widened to the hull of the
    regions of that structural attribute it overlaps.
    """
    if expand is None:
        return matchset
    regions = corpus.regions(expand)
    out = []
    for start, end in matchset.intervals:
        indices = regions.overlapping(start, end)
        if not indices:
            continue
        out.append((regions.bounds(indices[0])[0],
                    regions.bounds(indices[-1])[1]))
    return MatchSet.build(matchset.corpus_id, out)
