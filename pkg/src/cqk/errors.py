"""Exception hierarchy shared by all cqk modules."""


class CqkError(Exception):
    """Base class for all errors raised by cqk."""


class UnknownAttributeError(CqkError):
    """An attribute name is not declared on the corpus."""


class PositionRangeError(CqkError):
    """A corpus position or value id is out of range."""


class CorpusFormatError(CqkError):
    """An encoded corpus file is missing, truncated or corrupt."""


class VerticalFormatError(CqkError):
    """Bad vertical input; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None
                         else "line %d: %s" % (line, message))
        self.line = line


class RegistryError(CqkError):
    """Malformed registry file or unresolvable corpus id."""


class QuerySyntaxError(CqkError):
    """Query text could not be parsed; carries line/column and the
    token kinds that would have been accepted."""

    def __init__(self, message, line, col, expected=()):
        loc = "%d:%d" % (line, col)
        exp = " (expected %s)" % ", ".join(sorted(expected)) if expected else ""
        super().__init__("%s at %s%s" % (message, loc, exp))
        self.line = line
        self.col = col
        self.expected = frozenset(expected)


class QueryCompileError(CqkError):
    """The query parsed, but refers to unknown attributes, misuses a
    label, or calls a dynamic attribute with the wrong arity."""


class DynamicEvalError(CqkError):
    """An external tool backing a dynamic attribute failed."""

    def __init__(self, attribute, message):
        super().__init__("dynamic attribute %r: %s" % (attribute, message))
        self.attribute = attribute


class ResultError(CqkError):
    """Result file problems, including corpus-id mismatches."""


class NotAlignedError(CqkError):
    """Alignment data was requested from an unaligned corpus."""


class RemoteError(CqkError):
    """Remote attribute access failed; message names host:port."""
