"""Command-line workbench: encode, query, KWIC, set operations,
word lists, bigram lookup and the TCP/HTTP servers."""

import glob
import json
import os
import sys
import time

import click

from . import encoder, kwic as kwicmod, registry, remote, results
from .errors import CqkError
from .queryeval import DEFAULT_MAX_MATCH_LENGTH, run_query

HISTORY_VAR = "CQK_HISTORY"


def history_path():
    return os.environ.get(HISTORY_VAR,
                          os.path.expanduser("~/.cqk_history"))


def append_history(query_text, corpus_id):
    entry = {"query": query_text, "corpus": corpus_id,
             "timestamp": time.time()}
    with open(history_path(), "a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry) + "\n")


def read_history():
    path = history_path()
    if not os.path.exists(path):
        return []
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _resolve(corpus_id):
    try:
        return registry.resolve_corpus(corpus_id)
    except CqkError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main():
    """cqk: a corpus query workbench."""


@main.command()
@click.argument("vertical_file", type=click.Path(exists=True))
@click.option("--id", "corpus_id", required=True, help="Corpus id.")
@click.option("--home", required=True, type=click.Path(),
              help="Directory for the encoded files.")
@click.option("-P", "--positional", default="word",
              help="Comma-separated positional attribute names.")
@click.option("-S", "--structural", default="",
              help="Comma-separated structural attribute names.")
@click.option("--registry-dir", type=click.Path(),
              help="Also write a registry file into this directory.")
@click.option("--bigram", "bigram_specs", multiple=True,
              metavar="ATTR:WINDOW", help="Build a bigram table.")
@click.option("--force", is_flag=True,
              help="Overwrite an existing encoded corpus.")
def encode(vertical_file, corpus_id, home, positional, structural,
           registry_dir, bigram_specs, force):
    """Encode a vertical-format file into an indexed corpus."""
    positional_names = [n for n in positional.split(",") if n]
    structural_names = [n for n in structural.split(",") if n]
    if os.path.isdir(home) and glob.glob(os.path.join(home, "*.tok")) \
            and not force:
        raise click.ClickException(
            "%s already contains an encoded corpus (use --force)" % home)
    try:
        with open(vertical_file, encoding="utf-8") as fh:
            text = fh.read()
        size = encoder.encode(text, positional_names, structural_names, home)
        for name in positional_names:
            encoder.build_inverted_index(home, name)
        for spec in bigram_specs:
            attr, _, window = spec.partition(":")
            encoder.build_bigram_table(home, attr, int(window or "1"))
    except (CqkError, UnicodeDecodeError) as exc:
        raise click.ClickException(str(exc))
    if registry_dir:
        os.makedirs(registry_dir, exist_ok=True)
        decl = registry.RegistryDecl(
            id=corpus_id, home=os.path.abspath(home),
            positional=[(n, None) for n in positional_names],
            structural=list(structural_names))
        with open(os.path.join(registry_dir, corpus_id), "w",
                  encoding="utf-8") as fh:
            fh.write(registry.serialize_registry(decl))
    click.echo("%d tokens, %d positional, %d structural"
               % (size, len(positional_names), len(structural_names)))


@main.command()
@click.argument("corpus_id")
@click.argument("query_text")
@click.option("-o", "--output", type=click.Path(),
              help="Write the result file here.")
@click.option("--sub", "subcorpus_file", type=click.Path(exists=True),
              help="Restrict matches to a saved result.")
@click.option("--max-match-length", default=DEFAULT_MAX_MATCH_LENGTH,
              show_default=True)
def query(corpus_id, query_text, output, subcorpus_file, max_match_length):
    """Evaluate a query and report the match count."""
    _, corpus = _resolve(corpus_id)
    subcorpus = None
    try:
        if subcorpus_file:
            loaded = results.load_result(subcorpus_file)
            if loaded.matchset.corpus_id != corpus_id:
                raise click.ClickException(
                    "subcorpus was computed on corpus %r"
                    % loaded.matchset.corpus_id)
            subcorpus = loaded.matchset
        matchset = run_query(query_text, corpus, subcorpus,
                             max_match_length)
    except CqkError as exc:
        raise click.ClickException(str(exc))
    append_history(query_text, corpus_id)
    if output:
        results.save_result(
            results.NamedResult(output, matchset, query_text), output)
    click.echo("%d matches" % len(matchset))


@main.command()
@click.argument("corpus_id")
@click.argument("result_file", type=click.Path(exists=True))
@click.option("--context", default="5",
              help="Tokens per side, or a structural attribute name.")
@click.option("--sort", "sort_key", default="position",
              type=click.Choice(kwicmod.SORT_KEYS))
@click.option("--attrs", default="word",
              help="Comma-separated attributes to display per token.")
@click.option("--aligned", is_flag=True,
              help="Show aligned target-corpus text instead of KWIC.")
def kwic(corpus_id, result_file, context, sort_key, attrs, aligned):
    """Print a concordance for a saved result."""
    _, corpus = _resolve(corpus_id)
    loaded = results.load_result(result_file)
    if loaded.matchset.corpus_id != corpus_id:
        raise click.ClickException("result was computed on corpus %r"
                                   % loaded.matchset.corpus_id)
    try:
        if aligned:
            if not corpus.aligned_to:
                raise click.ClickException("corpus %r is not aligned"
                                           % corpus_id)
            _, target = _resolve(corpus.aligned_to)
            for source_text, target_text in kwicmod.aligned_lines(
                    loaded.matchset, corpus, target):
                click.echo(source_text)
                click.echo(target_text)
                click.echo("")
            return
        ctx = int(context) if context.lstrip("-").isdigit() else context
        lines = kwicmod.kwic_lines(loaded.matchset, corpus, ctx,
                                   [n for n in attrs.split(",") if n])
        for i in kwicmod.sort_lines(lines, sort_key):
            click.echo(lines[i].render())
    except CqkError as exc:
        raise click.ClickException(str(exc))


_SETOP_NAMES = {"union": "union", "intersect": "intersection",
                "intersection": "intersection", "difference": "difference"}


@main.command()
@click.argument("kind", type=click.Choice(sorted(_SETOP_NAMES)))
@click.argument("file_a", type=click.Path(exists=True))
@click.argument("file_b", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(),
              help="Write the combined result here (default stdout).")
def setop(kind, file_a, file_b, output):
    """Combine two result files with a set operation."""
    a = results.load_result(file_a)
    b = results.load_result(file_b)
    try:
        combined = results.set_op(_SETOP_NAMES[kind], a.matchset,
                                  b.matchset)
    except CqkError as exc:
        raise click.ClickException(str(exc))
    named = results.NamedResult(output or "-", combined)
    if output:
        results.save_result(named, output)
        click.echo("%d intervals" % len(combined))
    else:
        for start, end in combined.intervals:
            click.echo("%d\t%d" % (start, end))


@main.command()
@click.argument("corpus_id")
@click.argument("attr_name")
def wordlist(corpus_id, attr_name):
    """Print attribute values with frequencies, most frequent first."""
    _, corpus = _resolve(corpus_id)
    try:
        attr = corpus.attr(attr_name)
    except CqkError as exc:
        raise click.ClickException(str(exc))
    entries = [(attr.id_to_str(vid), attr.freq(vid))
               for vid in range(attr.lexicon_size)]
    for value, freq in sorted(entries, key=lambda e: (-e[1], e[0])):
        click.echo("%s\t%d" % (value, freq))


@main.command()
@click.argument("corpus_id")
@click.argument("attr_name")
@click.argument("value1", required=False)
@click.argument("value2", required=False)
@click.option("--window", default=1, show_default=True)
def bigram(corpus_id, attr_name, value1, value2, window):
    """Look up a bigram count, or dump the whole table."""
    _, corpus = _resolve(corpus_id)
    try:
        attr = corpus.attr(attr_name)
        table = corpus.bigrams.get((attr_name, window))
        if table is None:
            raise click.ClickException(
                "no bigram table for attribute %r, window %d"
                % (attr_name, window))
        if value1 is not None and value2 is not None:
            id1 = attr.str_to_id(value1)
            id2 = attr.str_to_id(value2)
            count = 0
            if id1 is not None and id2 is not None:
                count = table.count(id1, id2)
            click.echo(str(count))
        else:
            for (id1, id2) in sorted(table.counts):
                click.echo("%s\t%s\t%d" % (attr.id_to_str(id1),
                                           attr.id_to_str(id2),
                                           table.counts[(id1, id2)]))
    except CqkError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.argument("corpus_ids", nargs=-1, required=True)
@click.option("--tcp", "tcp_addr", metavar="HOST:PORT",
              help="Serve the binary attribute protocol.")
@click.option("--http", "http_addr", metavar="HOST:PORT",
              help="Serve the JSON API for the web concordancer.")
def serve(corpus_ids, tcp_addr, http_addr):
    """Serve corpora over TCP (attribute data) or HTTP (JSON API)."""
    if bool(tcp_addr) == bool(http_addr):
        raise click.ClickException("choose exactly one of --tcp / --http")
    corpora = {}
    for corpus_id in corpus_ids:
        _, corpora[corpus_id] = _resolve(corpus_id)
    if tcp_addr:
        host, _, port = tcp_addr.rpartition(":")
        click.echo("serving %s on %s" % (", ".join(corpora), tcp_addr))
        remote.serve(corpora, (host or "127.0.0.1", int(port)))
    else:
        import uvicorn
        from .httpapi import create_app
        host, _, port = http_addr.rpartition(":")
        app = create_app(corpora, history_path())
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
