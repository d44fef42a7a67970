"""Binary message framing and the TCP transport for two-process runs.

Frame layout: 4-byte big-endian payload length, 1-byte message type, payload.
Types: 0x01 INIT, 0x02 SCORES, 0x03 MASK, 0x04 TERMINATE. All integers are
big-endian; ciphertexts use the backend serialization; vectors and matrices
are prefixed with a 4-byte element count and laid out row-major.

One protocol session per connection. The server (Bob) is stateless across
sessions and never sees a secret key or plaintext graph data; the client
(Alice) drives the same state machine as protocol.run_local.
"""
from __future__ import annotations

import os
import socket
import socketserver
import time
from dataclasses import dataclass

from hechordal.backend import (
    HeParams,
    backend_tag,
    deserialize_ciphertext,
    serialize_ciphertext,
)
from hechordal.graphs import Graph
from hechordal.linalg import CtMatrix, CtVector
from hechordal.protocol import (
    Outcome,
    Verdict,
    alice_init,
    alice_step,
    bob_init,
    bob_round,
    expected_score_level,
    InitPayload,
    NextMask,
    PublicKey,
)

PROTOCOL_VERSION = 1

MSG_INIT = 0x01
MSG_SCORES = 0x02
MSG_MASK = 0x03
MSG_TERMINATE = 0x04

VERDICT_CHORDAL = 0x01
VERDICT_NOT_CHORDAL = 0x02
VERDICT_ABORTED_BUDGET = 0x03
VERDICT_ABORTED_NEGOTIATION = 0x04
VERDICT_ABORTED_TRANSPORT = 0x05

DEFAULT_TIMEOUT_MS = 30_000
DEFAULT_MAX_MSG = 64 * 1024 * 1024


class WireError(Exception):
    pass


class MalformedFrame(WireError):
    pass


class UnsupportedVersion(WireError):
    pass


class OversizeMessage(WireError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    host: str
    port: int
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_msg: int = DEFAULT_MAX_MSG

    @classmethod
    def from_endpoint(cls, endpoint: str, timeout_ms: int | None = None, max_msg: int | None = None):
        host, sep, port = endpoint.rpartition(":")
        if not sep or not port.isdigit():
            raise ValueError(f"endpoint must look like HOST:PORT, got {endpoint!r}")
        if timeout_ms is None:
            timeout_ms = int(os.environ.get("HECHORDAL_TIMEOUT_MS", DEFAULT_TIMEOUT_MS))
        if max_msg is None:
            max_msg = int(os.environ.get("HECHORDAL_MAX_MSG", DEFAULT_MAX_MSG))
        return cls(host or "127.0.0.1", int(port), timeout_ms, max_msg)


@dataclass(frozen=True)
class Init:
    version: int
    n: int
    params_digest: bytes
    tag: int
    t: int
    q: int
    budget: int | None
    adjacency: CtMatrix
    mask: CtVector


@dataclass(frozen=True)
class Scores:
    round: int
    values: CtVector


@dataclass(frozen=True)
class Mask:
    round: int
    values: CtVector


@dataclass(frozen=True)
class Terminate:
    verdict_code: int
    rounds_used: int


def _u32(value: int) -> bytes:
    return value.to_bytes(4, "big")


def _bigint(value: int) -> bytes:
    raw = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return _u32(len(raw)) + raw


def _read_u32(data, offset):
    if offset + 4 > len(data):
        raise MalformedFrame("truncated integer field")
    return int.from_bytes(data[offset : offset + 4], "big"), offset + 4


def _read_bigint(data, offset):
    length, offset = _read_u32(data, offset)
    if offset + length > len(data):
        raise MalformedFrame("truncated big integer field")
    return int.from_bytes(data[offset : offset + length], "big"), offset + length


def _pack_cts(cts) -> bytes:
    parts = [_u32(len(cts))]
    parts.extend(serialize_ciphertext(c) for c in cts)
    return b"".join(parts)


def _unpack_cts(data, offset, params, expected):
    count, offset = _read_u32(data, offset)
    if count != expected:
        raise MalformedFrame(f"expected {expected} ciphertexts, frame declares {count}")
    out = []
    for _ in range(count):
        try:
            c, offset = deserialize_ciphertext(data, offset, params)
        except ValueError as exc:
            raise MalformedFrame(str(exc)) from None
        out.append(c)
    return out, offset


def encode(message) -> bytes:
    """Serialize a message to a complete frame (length prefix included)."""
    if isinstance(message, Init):
        if len(message.params_digest) != 32:
            raise ValueError("params digest must be 32 bytes")
        budget = b"\x00" if message.budget is None else b"\x01" + _u32(message.budget)
        payload = (
            bytes((message.version,))
            + _u32(message.n)
            + message.params_digest
            + bytes((message.tag,))
            + _bigint(message.t)
            + _bigint(message.q)
            + budget
            + _pack_cts([c for row in message.adjacency.rows for c in row])
            + _pack_cts(message.mask.entries)
        )
        kind = MSG_INIT
    elif isinstance(message, Scores):
        payload = _u32(message.round) + _pack_cts(message.values.entries)
        kind = MSG_SCORES
    elif isinstance(message, Mask):
        payload = _u32(message.round) + _pack_cts(message.values.entries)
        kind = MSG_MASK
    elif isinstance(message, Terminate):
        payload = _u32(message.verdict_code) + _u32(message.rounds_used)
        kind = MSG_TERMINATE
    else:
        raise TypeError(f"not a wire message: {message!r}")
    return _u32(len(payload)) + bytes((kind,)) + payload


def decode(frame: bytes, params: HeParams | None = None, max_msg: int = DEFAULT_MAX_MSG):
    """Parse a complete frame back into a message.

    SCORES and MASK frames contain bare ciphertexts, so the session params
    must be supplied to reattach them; INIT is self-contained.
    """
    if len(frame) < 5:
        raise MalformedFrame("frame shorter than header")
    declared = int.from_bytes(frame[:4], "big")
    if declared > max_msg:
        raise OversizeMessage(f"declared payload of {declared} bytes exceeds limit {max_msg}")
    if declared != len(frame) - 5:
        raise MalformedFrame(f"declared payload {declared} bytes, got {len(frame) - 5}")
    kind = frame[4]
    data = frame[5:]
    if kind == MSG_INIT:
        return _decode_init(data)
    if kind in (MSG_SCORES, MSG_MASK):
        if params is None:
            raise ValueError("session params required to decode SCORES/MASK frames")
        round_index, offset = _read_u32(data, 0)
        count, _ = _read_u32(data, offset)
        cts, offset = _unpack_cts(data, offset, params, count)
        if offset != len(data):
            raise MalformedFrame("trailing bytes after message payload")
        vector = CtVector(len(cts), tuple(cts))
        return Scores(round_index, vector) if kind == MSG_SCORES else Mask(round_index, vector)
    if kind == MSG_TERMINATE:
        if len(data) != 8:
            raise MalformedFrame(f"TERMINATE payload must be 8 bytes, got {len(data)}")
        return Terminate(int.from_bytes(data[:4], "big"), int.from_bytes(data[4:], "big"))
    raise MalformedFrame(f"unknown message type {kind:#x}")


def _decode_init(data) -> Init:
    if len(data) < 1:
        raise MalformedFrame("empty INIT payload")
    version = data[0]
    if version != PROTOCOL_VERSION:
        raise UnsupportedVersion(f"protocol version {version}, expected {PROTOCOL_VERSION}")
    n, offset = _read_u32(data, 1)
    if offset + 32 > len(data):
        raise MalformedFrame("truncated params digest")
    digest = bytes(data[offset : offset + 32])
    offset += 32
    if offset >= len(data):
        raise MalformedFrame("truncated backend tag")
    tag = data[offset]
    offset += 1
    t, offset = _read_bigint(data, offset)
    q, offset = _read_bigint(data, offset)
    if offset >= len(data):
        raise MalformedFrame("truncated budget field")
    flag = data[offset]
    offset += 1
    budget = None
    if flag == 1:
        budget, offset = _read_u32(data, offset)
    elif flag != 0:
        raise MalformedFrame(f"bad budget flag {flag:#x}")
    try:
        params = HeParams(t=t, q=q, budget=budget, seed=0)
    except ValueError as exc:
        raise MalformedFrame(f"invalid params in INIT: {exc}") from None
    cts, offset = _unpack_cts(data, offset, params, n * n)
    mask_cts, offset = _unpack_cts(data, offset, params, n)
    if offset != len(data):
        raise MalformedFrame("trailing bytes after INIT payload")
    rows = tuple(tuple(cts[i * n : (i + 1) * n]) for i in range(n))
    return Init(version, n, digest, tag, t, q, budget, CtMatrix(n, rows), CtVector(n, tuple(mask_cts)))


def init_message(payload: InitPayload) -> Init:
    params = payload.pk.params
    return Init(
        version=PROTOCOL_VERSION,
        n=payload.n,
        params_digest=params.digest,
        tag=payload.pk.tag,
        t=params.t,
        q=params.q,
        budget=params.budget,
        adjacency=payload.adjacency,
        mask=payload.mask,
    )


def verdict_code(verdict: Verdict) -> int:
    if verdict.outcome is Outcome.CHORDAL:
        return VERDICT_CHORDAL
    if verdict.outcome is Outcome.NOT_CHORDAL:
        return VERDICT_NOT_CHORDAL
    reason = verdict.reason or ""
    if "budget" in reason:
        return VERDICT_ABORTED_BUDGET
    if "negotiation" in reason:
        return VERDICT_ABORTED_NEGOTIATION
    return VERDICT_ABORTED_TRANSPORT


def _recv_exact(sock: socket.socket, count: int) -> bytes:
    chunks = []
    remaining = count
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            raise EOFError("peer closed the connection")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket, max_msg: int) -> bytes:
    header = _recv_exact(sock, 4)
    declared = int.from_bytes(header, "big")
    if declared > max_msg:
        raise OversizeMessage(f"incoming payload of {declared} bytes exceeds limit {max_msg}")
    return header + _recv_exact(sock, 1 + declared)


def write_frame(sock: socket.socket, frame: bytes) -> None:
    sock.sendall(frame)


class BobServer(socketserver.ThreadingTCPServer):
    """One Bob session per connection; sessions share only immutable config."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, cfg: SessionConfig, params: HeParams, backend: str = "masked"):
        self.cfg = cfg
        self.params = params
        self.expected_tag = backend_tag(backend)
        super().__init__((cfg.host, cfg.port), _BobHandler)

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"


class _BobHandler(socketserver.BaseRequestHandler):
    def handle(self):
        server: BobServer = self.server
        cfg = server.cfg
        sock = self.request
        sock.settimeout(cfg.timeout_ms / 1000.0)
        try:
            message = decode(read_frame(sock, cfg.max_msg), max_msg=cfg.max_msg)
        except UnsupportedVersion:
            self._terminate(sock, VERDICT_ABORTED_NEGOTIATION)
            return
        except (WireError, EOFError, OSError):
            return
        if not isinstance(message, Init):
            return
        if (
            message.params_digest != server.params.digest
            or message.tag != server.expected_tag
            or (message.t, message.q, message.budget)
            != (server.params.t, server.params.q, server.params.budget)
        ):
            self._terminate(sock, VERDICT_ABORTED_NEGOTIATION)
            return
        session_params = message.adjacency.params or server.params
        bob = bob_init(InitPayload(message.n, PublicKey(message.tag, session_params), message.adjacency, message.mask))
        mask = message.mask
        try:
            while True:
                scores = bob_round(bob, mask)
                write_frame(sock, encode(Scores(bob.round, scores)))
                reply = decode(read_frame(sock, cfg.max_msg), params=session_params, max_msg=cfg.max_msg)
                if isinstance(reply, Terminate):
                    return
                if not isinstance(reply, Mask) or reply.round != bob.round + 1:
                    return
                mask = reply.values
        except (WireError, EOFError, OSError, ValueError):
            return

    @staticmethod
    def _terminate(sock, code: int) -> None:
        try:
            write_frame(sock, encode(Terminate(code, 0)))
        except OSError:
            pass


def serve(cfg: SessionConfig, params: HeParams, backend: str = "masked") -> None:
    """Run Bob sessions until interrupted (blocking)."""
    with BobServer(cfg, params, backend) as server:
        server.serve_forever()


def connect(cfg: SessionConfig, g: Graph, params: HeParams, backend: str = "masked"):
    """Run one Alice session against a remote Bob; returns (Verdict, Transcript).

    Transport failures yield ABORTED(transport); a parameter-negotiation
    rejection from the server yields ABORTED(negotiation). Everything else is
    identical to run_local on the same inputs.
    """
    alice, payload = alice_init(g, params, backend=backend)
    if g.n == 0:
        verdict = Verdict(Outcome.CHORDAL, 0)
        alice.transcript.verdict = verdict
        return verdict, alice.transcript
    try:
        sock = socket.create_connection((cfg.host, cfg.port), timeout=cfg.timeout_ms / 1000.0)
    except OSError:
        verdict = Verdict(Outcome.ABORTED, 0, "transport failure: connection refused or timed out")
        alice.transcript.verdict = verdict
        return verdict, alice.transcript
    with sock:
        sock.settimeout(cfg.timeout_ms / 1000.0)
        outbound = encode(init_message(payload))
        started = time.perf_counter()
        try:
            write_frame(sock, outbound)
            while True:
                frame = read_frame(sock, cfg.max_msg)
                message = decode(frame, params=params, max_msg=cfg.max_msg)
                if isinstance(message, Terminate):
                    verdict = Verdict(Outcome.ABORTED, alice.round, _remote_abort_reason(message))
                    alice.transcript.verdict = verdict
                    return verdict, alice.transcript
                if not isinstance(message, Scores) or message.round != alice.round + 1:
                    raise MalformedFrame(f"expected SCORES for round {alice.round + 1}")
                want = expected_score_level(message.round, refresh=False)
                assert all(c.level == want for c in message.values.entries), "depth accounting drifted"
                result = alice_step(alice, message.values)
                elapsed = (time.perf_counter() - started) * 1000.0
                if alice.transcript.rounds and alice.transcript.rounds[-1].round == message.round:
                    record = alice.transcript.rounds[-1]
                    record.millis = elapsed
                    record.bytes_sent = len(outbound)
                    record.bytes_received = len(frame)
                if isinstance(result, Verdict):
                    write_frame(sock, encode(Terminate(verdict_code(result), result.rounds_used)))
                    return result, alice.transcript
                assert isinstance(result, NextMask)
                outbound = encode(Mask(alice.round + 1, result.mask))
                started = time.perf_counter()
                write_frame(sock, outbound)
        except (WireError, EOFError, OSError) as exc:
            verdict = Verdict(Outcome.ABORTED, alice.round, f"transport failure: {exc}")
            alice.transcript.verdict = verdict
            return verdict, alice.transcript


def _remote_abort_reason(message: Terminate) -> str:
    if message.verdict_code == VERDICT_ABORTED_NEGOTIATION:
        return "negotiation failed: parameter digest or backend mismatch"
    return f"remote abort (code {message.verdict_code:#x})"
