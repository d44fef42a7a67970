import random
import socket
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hechordal.backend import Ciphertext, default_params, keygen
from hechordal.graphs import builtin_graph, gen_gnp
from hechordal.linalg import CtVector, encrypt_vector
from hechordal.protocol import Outcome, alice_init, run_local
from hechordal.wire import (
    BobServer,
    Mask,
    MalformedFrame,
    OversizeMessage,
    Scores,
    SessionConfig,
    Terminate,
    UnsupportedVersion,
    connect,
    decode,
    encode,
    init_message,
)

PARAMS = default_params(16)


@pytest.fixture
def bob_server():
    server = BobServer(SessionConfig("127.0.0.1", 0), PARAMS, backend="masked")
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()


def _cfg(server, **overrides):
    host, port = server.server_address[:2]
    return SessionConfig(host, port, **overrides)


def test_terminate_frame_is_13_bytes():
    frame = encode(Terminate(0x01, 3))
    assert frame == bytes.fromhex("00000008040000000100000003")
    assert len(frame) == 13
    assert int.from_bytes(frame[:4], "big") == 8
    assert decode(frame) == Terminate(0x01, 3)


def ct_vector(backend, n, seed=0):
    pk, _ = keygen(PARAMS, backend)
    return encrypt_vector(pk, [seed % 2] * n, random.Random(seed))


@given(st.sampled_from(["passthrough", "masked"]), st.integers(1, 6), st.integers(0, 99), st.integers(1, 40))
@settings(max_examples=40)
def test_scores_and_mask_round_trip(backend, n, seed, round_index):
    # Passthrough payloads are raw centered plaintexts, masked ones anything in [0, q).
    pk, _ = keygen(PARAMS, backend)
    rng = random.Random(seed)
    bound = PARAMS.plaintext_bound
    draw = (lambda: rng.randrange(-bound, bound + 1)) if backend == "passthrough" else (lambda: rng.randrange(PARAMS.q))
    values = CtVector(n, tuple(Ciphertext(pk.tag, rng.randrange(6), draw(), pk.params) for _ in range(n)))
    for message in (Scores(round_index, values), Mask(round_index, values)):
        assert decode(encode(message), params=PARAMS) == message


@given(st.sampled_from(["passthrough", "masked"]), st.integers(0, 5), st.integers(0, 99))
@settings(max_examples=30, deadline=None)
def test_init_round_trip(backend, n, seed):
    g = gen_gnp(n, 0.5, seed)
    _, payload = alice_init(g, PARAMS, backend=backend)
    message = init_message(payload)
    assert decode(encode(message)) == message


def test_terminate_round_trip():
    for code in (1, 2, 3, 4, 5):
        assert decode(encode(Terminate(code, 7))) == Terminate(code, 7)


def test_decode_rejects_garbage():
    with pytest.raises(MalformedFrame):
        decode(b"\x00\x00")
    frame = encode(Terminate(1, 2))
    with pytest.raises(MalformedFrame):
        decode(frame[:-1])
    with pytest.raises(MalformedFrame):
        decode(frame + b"\x00")
    with pytest.raises(MalformedFrame):
        decode(frame[:4] + b"\x7e" + frame[5:])
    with pytest.raises(OversizeMessage):
        decode(frame, max_msg=4)


def test_decode_scores_requires_params():
    message = Scores(1, ct_vector("masked", 3))
    with pytest.raises(ValueError):
        decode(encode(message))


def test_unsupported_version():
    _, payload = alice_init(builtin_graph("path-3"), PARAMS)
    frame = bytearray(encode(init_message(payload)))
    frame[5] = 9  # version byte sits right after the frame header
    with pytest.raises(UnsupportedVersion):
        decode(bytes(frame))


def test_init_rejects_bad_counts():
    _, payload = alice_init(builtin_graph("path-3"), PARAMS)
    good = encode(init_message(payload))
    # n field claims 4 vertices while the matrices still carry 3.
    bad = bytearray(good)
    bad[6:10] = (4).to_bytes(4, "big")
    with pytest.raises(MalformedFrame):
        decode(bytes(bad))


@pytest.mark.parametrize("name,outcome", [("fig3", Outcome.CHORDAL), ("fig1b", Outcome.NOT_CHORDAL)])
def test_loopback_matches_run_local(bob_server, name, outcome):
    g = builtin_graph(name)
    net_verdict, net_transcript = connect(_cfg(bob_server), g, PARAMS)
    loc_verdict, loc_transcript = run_local(g, PARAMS)
    assert net_verdict.outcome is outcome
    assert net_verdict == loc_verdict
    assert [r.scores for r in net_transcript.rounds] == [r.scores for r in loc_transcript.rounds]
    assert [r.mask for r in net_transcript.rounds] == [r.mask for r in loc_transcript.rounds]
    assert all(r.bytes_sent > 0 and r.bytes_received > 0 for r in net_transcript.rounds)


def test_negotiation_mismatch(bob_server):
    verdict, _ = connect(_cfg(bob_server), builtin_graph("fig3"), default_params(16, budget=7))
    assert verdict.outcome is Outcome.ABORTED
    assert "negotiation" in verdict.reason


def test_backend_mismatch_is_negotiation_failure(bob_server):
    verdict, _ = connect(_cfg(bob_server), builtin_graph("fig3"), PARAMS, backend="passthrough")
    assert verdict.outcome is Outcome.ABORTED
    assert "negotiation" in verdict.reason


def test_connection_refused_is_transport_abort():
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    verdict, transcript = connect(SessionConfig("127.0.0.1", port, timeout_ms=500), builtin_graph("fig3"), PARAMS)
    assert verdict.outcome is Outcome.ABORTED
    assert "transport" in verdict.reason
    assert transcript.verdict == verdict


def test_server_closing_mid_session_is_transport_abort():
    ready = threading.Event()
    address = {}

    def half_server():
        listener = socket.socket()
        listener.bind(("127.0.0.1", 0))
        listener.listen(1)
        address["port"] = listener.getsockname()[1]
        ready.set()
        conn, _ = listener.accept()
        conn.recv(64)  # start of INIT, then vanish
        conn.close()
        listener.close()

    thread = threading.Thread(target=half_server, daemon=True)
    thread.start()
    ready.wait(2)
    verdict, _ = connect(SessionConfig("127.0.0.1", address["port"], timeout_ms=2000), builtin_graph("fig3"), PARAMS)
    thread.join(2)
    assert verdict.outcome is Outcome.ABORTED
    assert "transport" in verdict.reason


def test_oversize_limit_aborts_client(bob_server):
    verdict, _ = connect(_cfg(bob_server, max_msg=64), builtin_graph("fig3"), PARAMS)
    assert verdict.outcome is Outcome.ABORTED
    assert "transport" in verdict.reason


def test_concurrent_sessions(bob_server):
    cfg = _cfg(bob_server)
    graphs = [builtin_graph(n) for n in ("fig1a", "fig1b", "fig3", "cycle-4")]
    results = [None] * len(graphs)

    def run(i):
        results[i] = connect(cfg, graphs[i], PARAMS)[0]

    threads = [threading.Thread(target=run, args=(i,)) for i in range(len(graphs))]
    for t in threads:
        t.start()
    for t in threads:
        t.join(30)
    expected = [Outcome.CHORDAL, Outcome.NOT_CHORDAL, Outcome.CHORDAL, Outcome.NOT_CHORDAL]
    assert [v.outcome for v in results] == expected


def test_alice_messages_expose_only_ciphertexts():
    from hechordal.protocol import alice_step, bob_init, bob_round

    g = builtin_graph("fig3")
    alice, payload = alice_init(g, default_params(7))
    message = init_message(payload)
    for row in message.adjacency.rows:
        for c in row:
            assert c.payload not in (0, 1)
    for c in message.mask.entries:
        assert c.payload not in (0, 1)
    assert set(type(message).__dataclass_fields__) == {
        "version", "n", "params_digest", "tag", "t", "q", "budget", "adjacency", "mask",
    }
    # Same audit on a mid-session mask frame, straight off the captured bytes.
    bob = bob_init(payload)
    next_mask = alice_step(alice, bob_round(bob, payload.mask))
    frame = encode(Mask(2, next_mask.mask))
    decoded = decode(frame, params=default_params(7))
    for c in decoded.values.entries:
        assert c.payload not in (0, 1)


def test_version_mismatch_gets_negotiation_terminate(bob_server):
    _, payload = alice_init(builtin_graph("path-3"), PARAMS)
    frame = bytearray(encode(init_message(payload)))
    frame[5] = 9
    host, port = bob_server.server_address[:2]
    with socket.create_connection((host, port), timeout=5) as sock:
        sock.sendall(bytes(frame))
        reply = sock.recv(64)
    assert decode(reply) == Terminate(0x04, 0)


def test_session_config_from_endpoint(monkeypatch):
    cfg = SessionConfig.from_endpoint("10.0.0.1:9000")
    assert (cfg.host, cfg.port) == ("10.0.0.1", 9000)
    monkeypatch.setenv("HECHORDAL_TIMEOUT_MS", "1234")
    monkeypatch.setenv("HECHORDAL_MAX_MSG", "4096")
    cfg = SessionConfig.from_endpoint(":8000")
    assert (cfg.host, cfg.timeout_ms, cfg.max_msg) == ("127.0.0.1", 1234, 4096)
    with pytest.raises(ValueError):
        SessionConfig.from_endpoint("nope")
