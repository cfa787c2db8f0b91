"""Binary file helpers for the encoded corpus representation.

Every index file starts with the 4-byte magic ``CQK1`` followed by a
single type byte; all integers are little-endian unsigned 32-bit.
"""

import struct
from array import array

from .errors import CorpusFormatError

MAGIC = b"CQK1"
HEADER_LEN = 5

TYPE_LEX = 0x01      # concatenated NUL-terminated lexicon entries
TYPE_LEXIDX = 0x02   # byte offset of each entry within the .lex file
TYPE_TOK = 0x03      # one value id per corpus position
TYPE_INV = 0x04      # concatenated ascending position lists
TYPE_INVIDX = 0x05   # (offset-in-entries, count) per value id
TYPE_RNG = 0x06      # (start, end) region pairs
TYPE_BGR = 0x07      # window header + (id1, id2, count) triples
TYPE_ALG = 0x08      # (source-region, target-region) pairs


def write_payload(path, ftype, payload):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([ftype]))
        fh.write(payload)


def read_payload(path, ftype):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CorpusFormatError("cannot read %s: %s" % (path, exc)) from exc
    if len(data) < HEADER_LEN or data[:4] != MAGIC:
        raise CorpusFormatError("%s: bad magic" % path)
    if data[4] != ftype:
        raise CorpusFormatError("%s: expected file type 0x%02x, found 0x%02x"
                                % (path, ftype, data[4]))
    return data[HEADER_LEN:]


def pack_u32s(values):
    return struct.pack("<%dI" % len(values), *values)


def unpack_u32s(payload, path="<payload>"):
    if len(payload) % 4:
        raise CorpusFormatError("%s: truncated u32 payload" % path)
    out = array("I")
    out.frombytes(payload)
    if out.itemsize != 4:  # pragma: no cover - exotic platforms
        out = array("I", struct.unpack("<%dI" % (len(payload) // 4), payload))
    return out
