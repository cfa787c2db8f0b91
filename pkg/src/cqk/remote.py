"""TCP protocol for serving corpus attribute data over the network.

Both directions send the magic ``CQPR`` once when the connection
opens.  After that, requests are frames ``opcode:u8 length:u32le
payload`` and responses are frames ``status:u8 length:u32le payload``.
Strings travel as u32le-length-prefixed UTF-8.  Requests are
stateless: every request names its corpus and attribute.

The first request must be HELLO carrying the auth token; a wrong token
gets AUTH_FAIL and the connection is closed.  An empty server token
disables authentication (local testing).
"""

import os
import socket
import socketserver
import struct
import threading

from .errors import PositionRangeError, RemoteError

MAGIC = b"CQPR"

OP_HELLO = 0x01
OP_GET_META = 0x02
OP_GET_IDS = 0x03
OP_GET_STR = 0x04
OP_GET_POSITIONS = 0x05
OP_GET_REGIONS = 0x06

ST_OK = 0
ST_AUTH_FAIL = 1
ST_NOT_FOUND = 2
ST_MALFORMED = 3

MAX_FRAME = 1 << 20  # sanity cap; larger lengths are protocol violations

AUTH_TOKEN_VAR = "CQK_AUTH"


class ProtocolError(Exception):
    pass


def _recv_exact(sock, n):
    chunks = b""
    while len(chunks) < n:
        part = sock.recv(n - len(chunks))
        if not part:
            raise EOFError
        chunks += part
    return chunks


def read_frame(sock):
    header = _recv_exact(sock, 5)
    opcode = header[0]
    length = struct.unpack("<I", header[1:])[0]
    if length > MAX_FRAME:
        raise ProtocolError("frame length %d exceeds limit" % length)
    return opcode, _recv_exact(sock, length)


def write_frame(sock, opcode, payload=b""):
    sock.sendall(bytes([opcode]) + struct.pack("<I", len(payload)) + payload)


def pack_str(text):
    raw = text.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


class _Reader:
    def __init__(self, payload):
        self.payload = payload
        self.offset = 0

    def u32(self):
        if self.offset + 4 > len(self.payload):
            raise ProtocolError("truncated payload")
        value = struct.unpack_from("<I", self.payload, self.offset)[0]
        self.offset += 4
        return value

    def string(self):
        length = self.u32()
        if self.offset + length > len(self.payload):
            raise ProtocolError("truncated string")
        raw = self.payload[self.offset:self.offset + length]
        self.offset += length
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError("bad UTF-8 in string") from exc

    def done(self):
        if self.offset != len(self.payload):
            raise ProtocolError("trailing bytes in payload")


# -- server ---------------------------------------------------------------

class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        server = self.server
        try:
            sock.sendall(MAGIC)
            if _recv_exact(sock, 4) != MAGIC:
                return
            opcode, payload = read_frame(sock)
            if opcode != OP_HELLO:
                write_frame(sock, ST_MALFORMED)
                return
            reader = _Reader(payload)
            token = reader.string()
            reader.done()
            if server.auth_token and token != server.auth_token:
                write_frame(sock, ST_AUTH_FAIL)
                return
            write_frame(sock, ST_OK)
            while True:
                opcode, payload = read_frame(sock)
                status, response = self._dispatch(opcode, payload)
                write_frame(sock, status, response)
                if status == ST_MALFORMED:
                    return
        except (EOFError, ProtocolError, ConnectionError, OSError):
            return

    def _dispatch(self, opcode, payload):
        reader = _Reader(payload)
        try:
            if opcode == OP_GET_META:
                attr = self._attr(reader)
                reader.done()
                return ST_OK, struct.pack("<II", attr.size,
                                          attr.lexicon_size)
            if opcode == OP_GET_IDS:
                attr = self._attr(reader)
                start, count = reader.u32(), reader.u32()
                reader.done()
                if start > attr.size:
                    return ST_NOT_FOUND, b""
                ids = attr.stream[start:start + count]
                return ST_OK, struct.pack("<%dI" % len(ids), *ids)
            if opcode == OP_GET_STR:
                attr = self._attr(reader)
                vid = reader.u32()
                reader.done()
                if vid >= attr.lexicon_size:
                    return ST_NOT_FOUND, b""
                return ST_OK, pack_str(attr.id_to_str(vid))
            if opcode == OP_GET_POSITIONS:
                attr = self._attr(reader)
                vid = reader.u32()
                reader.done()
                if vid >= attr.lexicon_size:
                    return ST_NOT_FOUND, b""
                positions = attr.positions_of(vid)
                return ST_OK, struct.pack("<%dI" % len(positions),
                                          *positions)
            if opcode == OP_GET_REGIONS:
                corpus = self._corpus(reader)
                name = reader.string()
                first, count = reader.u32(), reader.u32()
                reader.done()
                if name not in corpus.structural:
                    return ST_NOT_FOUND, b""
                regions = corpus.structural[name].regions
                chunk = regions[first:first + count]
                flat = [v for pair in chunk for v in pair]
                return ST_OK, struct.pack("<%dI" % len(flat), *flat)
            return ST_MALFORMED, b""
        except _Lookup as exc:
            return exc.status, b""
        except ProtocolError:
            return ST_MALFORMED, b""

    def _corpus(self, reader):
        corpus_id = reader.string()
        corpus = self.server.corpora.get(corpus_id)
        if corpus is None:
            raise _Lookup(ST_NOT_FOUND)
        return corpus

    def _attr(self, reader):
        corpus = self._corpus(reader)
        name = reader.string()
        attr = corpus.positional.get(name)
        if attr is None:
            raise _Lookup(ST_NOT_FOUND)
        return attr


class _Lookup(Exception):
    def __init__(self, status):
        self.status = status


class CorpusServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, corpora, address, auth_token=None):
        self.corpora = dict(corpora)
        self.auth_token = (os.environ.get(AUTH_TOKEN_VAR, "")
                           if auth_token is None else auth_token)
        super().__init__(address, _Handler)


def serve(corpora, address, auth_token=None):
    """Serve attribute data until interrupted (blocking)."""
    with CorpusServer(corpora, address, auth_token) as server:
        server.serve_forever()


# -- client ---------------------------------------------------------------

_STREAM_BLOCK = 1024


class RemoteAttribute:
    """A positional attribute fetched from a corpus server.

    Interface-compatible with a local PositionalAttribute: query
    evaluation does not distinguish the two.  The lexicon and stream
    blocks are cached after first access.
    """

    def __init__(self, host, port, corpus_id, name, auth_token=None):
        self.host = host
        self.port = port
        self.corpus_id = corpus_id
        self.name = name
        self._auth_token = auth_token
        self._lock = threading.Lock()
        self._sock = None
        self._meta = None
        self._lexicon = {}
        self._str_ids = None
        self._blocks = {}
        self._positions = {}

    def _fail(self, message):
        raise RemoteError("attribute %r via %s:%d: %s"
                          % (self.name, self.host, self.port, message))

    def _connect(self):
        token = self._auth_token
        if token is None:
            token = os.environ.get(AUTH_TOKEN_VAR, "")
        try:
            sock = socket.create_connection((self.host, self.port),
                                            timeout=30)
        except OSError as exc:
            self._fail("unreachable (%s)" % exc)
        try:
            sock.sendall(MAGIC)
            if _recv_exact(sock, 4) != MAGIC:
                self._fail("bad server magic")
            write_frame(sock, OP_HELLO, pack_str(token))
            status, _ = read_frame(sock)
            if status == ST_AUTH_FAIL:
                self._fail("authentication rejected")
            if status != ST_OK:
                self._fail("handshake failed with status %d" % status)
        except (EOFError, ProtocolError, OSError):
            sock.close()
            self._fail("handshake failed")
        self._sock = sock

    def _request(self, opcode, payload):
        with self._lock:
            if self._sock is None:
                self._connect()
            try:
                write_frame(self._sock, opcode, payload)
                status, response = read_frame(self._sock)
            except (EOFError, ProtocolError, OSError) as exc:
                self._sock.close()
                self._sock = None
                self._fail("request failed (%s)" % exc)
            if status == ST_NOT_FOUND:
                self._fail("server reports not-found")
            if status != ST_OK:
                self._fail("server error status %d" % status)
            return response

    def _ref(self):
        return pack_str(self.corpus_id) + pack_str(self.name)

    def _load_meta(self):
        if self._meta is None:
            raw = self._request(OP_GET_META, self._ref())
            self._meta = struct.unpack("<II", raw)
        return self._meta

    @property
    def size(self):
        return self._load_meta()[0]

    @property
    def lexicon_size(self):
        return self._load_meta()[1]

    def id_at(self, pos):
        if not 0 <= pos < self.size:
            raise PositionRangeError(
                "attribute %r: position %d out of range (size %d)"
                % (self.name, pos, self.size))
        block = pos // _STREAM_BLOCK
        ids = self._blocks.get(block)
        if ids is None:
            start = block * _STREAM_BLOCK
            raw = self._request(
                OP_GET_IDS,
                self._ref() + struct.pack("<II", start, _STREAM_BLOCK))
            ids = struct.unpack("<%dI" % (len(raw) // 4), raw)
            self._blocks[block] = ids
        return ids[pos % _STREAM_BLOCK]

    def value_at(self, pos):
        return self.id_to_str(self.id_at(pos))

    def id_to_str(self, vid):
        if not 0 <= vid < self.lexicon_size:
            raise PositionRangeError(
                "attribute %r: value id %d out of range (lexicon size %d)"
                % (self.name, vid, self.lexicon_size))
        value = self._lexicon.get(vid)
        if value is None:
            raw = self._request(OP_GET_STR,
                                self._ref() + struct.pack("<I", vid))
            value = _Reader(raw).string()
            self._lexicon[vid] = value
        return value

    def str_to_id(self, value):
        if self._str_ids is None:
            self._str_ids = {self.id_to_str(vid): vid
                             for vid in range(self.lexicon_size)}
        return self._str_ids.get(value)

    def positions_of(self, vid):
        if not 0 <= vid < self.lexicon_size:
            raise PositionRangeError(
                "attribute %r: value id %d out of range (lexicon size %d)"
                % (self.name, vid, self.lexicon_size))
        cached = self._positions.get(vid)
        if cached is None:
            raw = self._request(OP_GET_POSITIONS,
                                self._ref() + struct.pack("<I", vid))
            cached = list(struct.unpack("<%dI" % (len(raw) // 4), raw))
            self._positions[vid] = cached
        return list(cached)

    def freq(self, vid):
        return len(self.positions_of(vid))

    def _check_id(self, vid):
        if not 0 <= vid < self.lexicon_size:
            raise PositionRangeError(
                "attribute %r: value id %d out of range" % (self.name, vid))
