"""JSON API consumed by the web concordancer.

Endpoints:
  GET    /corpora
  POST   /query                     {corpus, query, subcorpusResult?}
  GET    /results/{id}/kwic?context=&sort=&attrs=&page=&pageSize=
  POST   /results/setop             {kind, a, b}
  DELETE /results/{id}/lines        {indices}
  GET    /results/{id}/aligned?page=&pageSize=
  GET    /history    POST /history  {query, corpus}

Every error response carries {"error": {"kind", "message", "position"?}}.
"""

import json
import os
import threading
import time

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from . import kwic as kwicmod, results
from .errors import (CqkError, DynamicEvalError, NotAlignedError,
                     QueryCompileError, QuerySyntaxError,
                     UnknownAttributeError)
from .queryeval import DEFAULT_MAX_MATCH_LENGTH, run_query
from .results import NamedResult

DEFAULT_PAGE_SIZE = 50


class ApiError(Exception):
    def __init__(self, status, kind, message, position=None):
        self.status = status
        self.kind = kind
        self.message = message
        self.position = position


def _error_response(exc):
    body = {"kind": exc.kind, "message": exc.message}
    if exc.position is not None:
        body["position"] = exc.position
    return JSONResponse(status_code=exc.status, content={"error": body})


def _wrap(exc):
    if isinstance(exc, QuerySyntaxError):
        return ApiError(400, "syntax", str(exc),
                        {"line": exc.line, "column": exc.col})
    if isinstance(exc, (QueryCompileError, UnknownAttributeError)):
        return ApiError(400, "unknown-attribute", str(exc))
    if isinstance(exc, DynamicEvalError):
        return ApiError(500, "tool-failure", str(exc))
    if isinstance(exc, NotAlignedError):
        return ApiError(400, "not-aligned", str(exc))
    return ApiError(400, "error", str(exc))


class ResultStore:
    """Named query results for one server session (single writer)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._results = {}
        self._counter = 0

    def add(self, matchset, query_text=None):
        with self._lock:
            self._counter += 1
            result_id = "r%d" % self._counter
            self._results[result_id] = NamedResult(result_id, matchset,
                                                   query_text)
            return result_id

    def get(self, result_id):
        result = self._results.get(result_id)
        if result is None:
            raise ApiError(404, "unknown-result",
                           "no result with id %r" % result_id)
        return result

    def replace(self, result_id, matchset):
        with self._lock:
            old = self.get(result_id)
            self._results[result_id] = NamedResult(result_id, matchset,
                                                   old.query_text)


def create_app(corpora, history_file=None, resolver=None):
    """Build the FastAPI app over a dict of loaded corpora.

    ``resolver(corpus_id)`` may be given to load aligned target corpora
    on demand (defaults to lookup in ``corpora``).
    """
    app = FastAPI(title="cqk")
    store = ResultStore()
    history_lock = threading.Lock()

    def get_corpus(corpus_id):
        corpus = corpora.get(corpus_id)
        if corpus is None and resolver is not None:
            corpus = resolver(corpus_id)
        if corpus is None:
            raise ApiError(404, "unknown-corpus",
                           "no corpus with id %r" % corpus_id)
        return corpus

    def read_history():
        if not history_file or not os.path.exists(history_file):
            return []
        with open(history_file, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]

    @app.exception_handler(ApiError)
    async def handle_api_error(request, exc):
        return _error_response(exc)

    @app.exception_handler(CqkError)
    async def handle_cqk_error(request, exc):
        return _error_response(_wrap(exc))

    @app.get("/corpora")
    def list_corpora():
        out = []
        for corpus_id, corpus in sorted(corpora.items()):
            out.append({
                "id": corpus_id,
                "size": corpus.size,
                "positional": sorted(corpus.positional),
                "structural": sorted(corpus.structural),
                "dynamic": sorted(corpus.dynamic),
                "alignedTo": corpus.aligned_to,
            })
        return out

    @app.post("/query")
    def post_query(body: dict = Body(...)):
        corpus = get_corpus(body.get("corpus", ""))
        query_text = body.get("query", "")
        subcorpus = None
        if body.get("subcorpusResult"):
            sub = store.get(body["subcorpusResult"])
            if sub.matchset.corpus_id != corpus.id:
                raise ApiError(400, "corpus-mismatch",
                               "subcorpus belongs to corpus %r"
                               % sub.matchset.corpus_id)
            subcorpus = sub.matchset
        try:
            matchset = run_query(
                query_text, corpus, subcorpus,
                int(body.get("maxMatchLength", DEFAULT_MAX_MATCH_LENGTH)))
        except CqkError as exc:
            raise _wrap(exc) from exc
        result_id = store.add(matchset, query_text)
        if history_file:
            with history_lock, open(history_file, "a",
                                    encoding="utf-8") as fh:
                fh.write(json.dumps({"query": query_text,
                                     "corpus": corpus.id,
                                     "timestamp": time.time()}) + "\n")
        return {"resultId": result_id, "matchCount": len(matchset)}

    def _page(items, page, page_size):
        total = len(items)
        start = (page - 1) * page_size
        return items[start:start + page_size], total

    @app.get("/results/{result_id}/kwic")
    def get_kwic(result_id: str, context: str = "5",
                 sort: str = "position", attrs: str = "word",
                 page: int = 1, pageSize: int = DEFAULT_PAGE_SIZE):
        result = store.get(result_id)
        corpus = get_corpus(result.matchset.corpus_id)
        ctx = int(context) if context.lstrip("-").isdigit() else context
        show = [name for name in attrs.split(",") if name]
        lines = kwicmod.kwic_lines(result.matchset, corpus, ctx, show)
        order = kwicmod.sort_lines(lines, sort)
        page_order, total = _page(order, page, pageSize)
        return {
            "corpus": corpus.id,
            "query": result.query_text,
            "matchCount": len(result.matchset),
            "page": page,
            "pageSize": pageSize,
            "total": total,
            "lines": [{
                "index": i,
                "start": lines[i].interval[0],
                "end": lines[i].interval[1],
                "left": lines[i].left,
                "match": lines[i].match,
                "right": lines[i].right,
                "text": lines[i].render(),
            } for i in page_order],
        }

    @app.post("/results/setop")
    def post_setop(body: dict = Body(...)):
        kind = body.get("kind", "")
        a = store.get(body.get("a", ""))
        b = store.get(body.get("b", ""))
        if kind not in ("union", "intersection", "difference"):
            raise ApiError(400, "bad-setop",
                           "unknown set operation %r" % kind)
        try:
            combined = results.set_op(kind, a.matchset, b.matchset)
        except CqkError as exc:
            raise ApiError(400, "corpus-mismatch", str(exc)) from exc
        result_id = store.add(combined)
        return {"resultId": result_id, "matchCount": len(combined)}

    @app.delete("/results/{result_id}/lines")
    def delete_lines(result_id: str, body: dict = Body(...)):
        result = store.get(result_id)
        indices = body.get("indices", [])
        try:
            pruned = kwicmod.delete_lines(result.matchset, indices)
        except IndexError as exc:
            raise ApiError(400, "bad-index", str(exc)) from exc
        store.replace(result_id, pruned)
        return {"resultId": result_id, "matchCount": len(pruned)}

    @app.get("/results/{result_id}/aligned")
    def get_aligned(result_id: str, page: int = 1,
                    pageSize: int = DEFAULT_PAGE_SIZE):
        result = store.get(result_id)
        corpus = get_corpus(result.matchset.corpus_id)
        if not corpus.aligned_to:
            raise ApiError(400, "not-aligned",
                           "corpus %r is not aligned" % corpus.id)
        target = get_corpus(corpus.aligned_to)
        pairs = kwicmod.aligned_lines(result.matchset, corpus, target)
        page_pairs, total = _page(pairs, page, pageSize)
        return {
            "corpus": corpus.id,
            "target": corpus.aligned_to,
            "page": page,
            "pageSize": pageSize,
            "total": total,
            "pairs": [{"source": s, "target": t} for s, t in page_pairs],
        }

    @app.get("/history")
    def get_history():
        return read_history()

    @app.post("/history")
    def post_history(body: dict = Body(...)):
        entry = {"query": body.get("query", ""),
                 "corpus": body.get("corpus", ""),
                 "timestamp": time.time()}
        if history_file:
            with history_lock, open(history_file, "a",
                                    encoding="utf-8") as fh:
                fh.write(json.dumps(entry) + "\n")
        return entry

    return app
