"""Registry files: declare a corpus, its home directory and attributes.

A corpus is always addressed by its symbolic id, which is also the file
name of its registry file.  The directories searched for registry files
come from the ``CQK_REGISTRY`` environment variable (colon-separated).

Grammar (line oriented, ``#`` starts a comment):

    NAME "<display name>"
    ID <id>
    HOME <path>
    ATTRIBUTE <name> [REMOTE <host>:<port>]
    STRUCTURE <name>
    DYNAMIC <name>(<Type>{,<Type>}):<RetType> "<command>"
    ALIGNED <corpus-id>
"""

import os
import re
from dataclasses import dataclass, field

from .corpus import (Corpus, DynamicAttributeDecl, load_alignment,
                     load_bigrams, load_positional, load_regions)
from .errors import RegistryError

SEARCH_PATH_VAR = "CQK_REGISTRY"

_ID = re.compile(r"^[a-z0-9-]+$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
_DYNAMIC = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_-]*)\(([^)]*)\):(STRING|INT)$")
_REMOTE = re.compile(r"^([^\s:]+):(\d+)$")


@dataclass
class RegistryDecl:
    id: str
    home: str
    display_name: str = None
    positional: list = field(default_factory=list)  # (name, remote-or-None)
    structural: list = field(default_factory=list)
    dynamic: list = field(default_factory=list)  # DynamicAttributeDecl
    aligned_to: str = None


def _split_line(line):
    """Split a registry line into whitespace tokens, keeping one
    trailing double-quoted string intact."""
    line = line.strip()
    match = re.match(r'^(\S+)\s+(.*)$', line)
    if not match:
        return [line]
    keyword, rest = match.groups()
    quoted = re.match(r'^(.*?)"(.*)"\s*$', rest)
    if quoted:
        return [keyword] + quoted.group(1).split() + [quoted.group(2)]
    return [keyword] + rest.split()


def _strip_comment(line):
    """Drop everything from the first ``#`` outside double quotes."""
    in_quotes = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quotes = not in_quotes
        elif ch == "#" and not in_quotes:
            return line[:i]
    return line


def parse_registry(text):
    decl = RegistryDecl(id=None, home=None)
    names = set()

    def declare(name):
        if name in names:
            raise RegistryError("duplicate attribute name %r" % name)
        names.add(name)

    for lineno, raw in enumerate(text.split("\n"), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        tokens = _split_line(line)
        keyword = tokens[0]
        args = tokens[1:]

        def fail(message):
            raise RegistryError("line %d: %s" % (lineno, message))

        if keyword == "NAME":
            if len(args) != 1:
                fail("NAME takes one quoted string")
            decl.display_name = args[0]
        elif keyword == "ID":
            if decl.id is not None:
                fail("duplicate ID")
            if len(args) != 1 or not _ID.match(args[0]):
                fail("ID must be lowercase alphanumeric or '-'")
            decl.id = args[0]
        elif keyword == "HOME":
            if decl.home is not None:
                fail("duplicate HOME")
            if len(args) != 1:
                fail("HOME takes one path")
            decl.home = args[0]
        elif keyword == "ATTRIBUTE":
            if len(args) == 1:
                remote = None
            elif len(args) == 3 and args[1] == "REMOTE":
                m = _REMOTE.match(args[2])
                if not m:
                    fail("REMOTE needs <host>:<port>")
                remote = (m.group(1), int(m.group(2)))
            else:
                fail("ATTRIBUTE <name> [REMOTE <host>:<port>]")
            if not _NAME.match(args[0]):
                fail("bad attribute name %r" % args[0])
            declare(args[0])
            decl.positional.append((args[0], remote))
        elif keyword == "STRUCTURE":
            if len(args) != 1 or not _NAME.match(args[0]):
                fail("STRUCTURE takes one name")
            declare(args[0])
            decl.structural.append(args[0])
        elif keyword == "DYNAMIC":
            if len(args) < 2:
                fail("DYNAMIC <name>(<Types>):<RetType> \"<command>\"")
            signature = "".join(args[:-1])
            command = args[-1]
            m = _DYNAMIC.match(signature)
            if not m:
                fail("malformed DYNAMIC signature %r" % signature)
            arg_types = []
            for part in m.group(2).split(","):
                part = part.strip()
                if part not in ("String", "Int"):
                    fail("bad argument type %r" % part)
                arg_types.append(part)
            declare(m.group(1))
            decl.dynamic.append(DynamicAttributeDecl(
                m.group(1), tuple(arg_types), m.group(3), command))
        elif keyword == "ALIGNED":
            if len(args) != 1 or not _ID.match(args[0]):
                fail("ALIGNED takes a corpus id")
            decl.aligned_to = args[0]
        else:
            fail("unknown keyword %r" % keyword)

    if decl.id is None:
        raise RegistryError("missing ID")
    if decl.home is None:
        raise RegistryError("missing HOME")
    return decl


def serialize_registry(decl):
    lines = []
    if decl.display_name is not None:
        lines.append('NAME "%s"' % decl.display_name)
    lines.append("ID %s" % decl.id)
    lines.append("HOME %s" % decl.home)
    lines.append("")
    for name, remote in decl.positional:
        if remote is None:
            lines.append("ATTRIBUTE %s" % name)
        else:
            lines.append("ATTRIBUTE %s REMOTE %s:%d" % (name, *remote))
    for name in decl.structural:
        lines.append("STRUCTURE %s" % name)
    for dyn in decl.dynamic:
        lines.append('DYNAMIC %s(%s):%s "%s"'
                     % (dyn.name, ",".join(dyn.arg_types), dyn.return_type,
                        dyn.command))
    if decl.aligned_to is not None:
        lines.append("ALIGNED %s" % decl.aligned_to)
    return "\n".join(lines) + "\n"


def search_path(override=None):
    if override is not None:
        return list(override)
    raw = os.environ.get(SEARCH_PATH_VAR, "")
    return [d for d in raw.split(":") if d]


def find_registry(corpus_id, dirs=None):
    dirs = search_path(dirs)
    for directory in dirs:
        path = os.path.join(directory, corpus_id)
        if os.path.isfile(path):
            return path
    raise RegistryError(
        "corpus %r not found in registry path %s" % (corpus_id, dirs))


def load_corpus(decl):
    """Open all attribute files declared for a corpus."""
    positional = {}
    for name, remote in decl.positional:
        if remote is None:
            positional[name] = load_positional(decl.home, name)
        else:
            from .remote import RemoteAttribute
            positional[name] = RemoteAttribute(
                remote[0], remote[1], decl.id, name)
    structural = {name: load_regions(decl.home, name)
                  for name in decl.structural}
    bigrams = {}
    for name, _ in decl.positional:
        for window, table in load_bigrams(decl.home, name).items():
            bigrams[(name, window)] = table
    alignment = None
    if decl.aligned_to:
        source = decl.structural[0] if decl.structural else "s"
        alignment = load_alignment(decl.home, decl.aligned_to, source)
    return Corpus(id=decl.id, positional=positional, structural=structural,
                  dynamic={d.name: d for d in decl.dynamic},
                  bigrams=bigrams, alignment=alignment,
                  aligned_to=decl.aligned_to)


def resolve_corpus(corpus_id, dirs=None):
    """Find, parse and load a corpus by symbolic name."""
    path = find_registry(corpus_id, dirs)
    with open(path, encoding="utf-8") as fh:
        decl = parse_registry(fh.read())
    if decl.id != corpus_id:
        raise RegistryError(
            "registry file %s declares id %r" % (path, decl.id))
    return decl, load_corpus(decl)
