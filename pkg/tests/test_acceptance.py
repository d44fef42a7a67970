"""Acceptance suite: one test per release criterion, exact tolerances, one
PASS line printed per criterion (run with ``pytest tests/test_acceptance.py -v -s``).
"""
import itertools
import random
import threading
import time
from functools import lru_cache

from hechordal.backend import default_params, encrypt, keygen
from hechordal.graphs import (
    builtin_graph,
    chord_free_cycle_exists,
    eliminate,
    gen_chordal,
    gen_gnp,
    graph_from_edges,
    is_simplicial,
    mcs_peo,
)
from hechordal.linalg import decrypt_matrix, decrypt_vector, encrypt_adjacency, hadamard, mat_mul, simplicial_scores
from hechordal.protocol import Outcome, alice_init, alice_step, bob_init, bob_round, run_local
from hechordal.wire import BobServer, SessionConfig, connect

import oracles
from test_linalg import FIG1A_A2, FIG1A_M, FIG3_A2, FIG3_M, FIG3_SCORES

BACKENDS = ("passthrough", "masked")


def _report(number, text):
    print(f"\nACCEPTANCE PASS criterion {number}: {text}")


def test_criterion_1_seven_vertex_worked_example():
    started = time.perf_counter()
    g = builtin_graph("fig3")
    for backend in BACKENDS:
        pk, sk = keygen(default_params(g.n), backend)
        enc = encrypt_adjacency(pk, g, random.Random(0))
        squared = mat_mul(enc, enc)
        assert decrypt_matrix(sk, squared) == FIG3_A2
        assert decrypt_matrix(sk, hadamard(squared, enc)) == FIG3_M
        assert decrypt_vector(sk, simplicial_scores(enc)) == FIG3_SCORES
        _, transcript = run_local(g, default_params(g.n), backend=backend)
        assert transcript.rounds[0].scores == FIG3_SCORES
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(1, f"7-vertex example matrices and scores exact on both backends ({elapsed:.2f}s)")


def test_criterion_2_five_vertex_worked_example():
    started = time.perf_counter()
    g = builtin_graph("fig1a")
    for backend in BACKENDS:
        pk, sk = keygen(default_params(g.n), backend)
        enc = encrypt_adjacency(pk, g, random.Random(0))
        squared = mat_mul(enc, enc)
        assert decrypt_matrix(sk, squared) == FIG1A_A2
        assert decrypt_matrix(sk, hadamard(squared, enc)) == FIG1A_M
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(2, f"5-vertex example matrices exact on both backends ({elapsed:.2f}s)")


@lru_cache(maxsize=1)
def _exhaustive_n6():
    params = default_params(6)
    pairs = list(itertools.combinations(range(6), 2))
    disagreements = 0
    bound_violations = 0
    count = 0
    for bits in range(1 << len(pairs)):
        g = graph_from_edges(6, [e for i, e in enumerate(pairs) if bits >> i & 1])
        expected = eliminate(g)[0]
        verdict, _ = run_local(g, params, backend="passthrough")
        protocol_chordal = verdict.outcome is Outcome.CHORDAL
        if not (
            protocol_chordal == expected
            and mcs_peo(g)[0] == expected
            and chord_free_cycle_exists(g) == (not expected)
        ):
            disagreements += 1
        if verdict.rounds_used > max(g.n, 1):
            bound_violations += 1
        count += 1
    return {"count": count, "disagreements": disagreements, "bound_violations": bound_violations}


def test_criterion_3_exhaustive_oracle_equivalence():
    started = time.perf_counter()
    stats = _exhaustive_n6()
    elapsed = time.perf_counter() - started
    assert stats["count"] == 32768
    assert stats["disagreements"] == 0
    assert elapsed < 300.0
    _report(3, f"all 32768 graphs on 6 vertices agree across protocol and 3 oracles ({elapsed:.1f}s)")


@lru_cache(maxsize=1)
def _score_property_corpus():
    rng = random.Random(20240601)
    specs = []
    pairs = 0
    probabilities = itertools.cycle((0.1, 0.3, 0.6))
    while pairs < 10_000:
        n = rng.randint(1, 40)
        specs.append((n, next(probabilities), rng.randrange(2**32)))
        pairs += n
    return tuple(specs)


def test_criterion_4_score_simpliciality_equivalence():
    checked = 0
    for n, p, seed in _score_property_corpus():
        g = gen_gnp(n, p, seed)
        pk, sk = keygen(default_params(n), "masked")
        scores = decrypt_vector(sk, simplicial_scores(encrypt_adjacency(pk, g, random.Random(seed))))
        for v, score in enumerate(scores):
            assert score <= 0
            assert (score == 0) == is_simplicial(g, v)
            checked += 1
    assert checked >= 10_000
    _report(4, f"{checked} (graph, vertex) pairs: score 0 iff simplicial, all scores <= 0")


def test_criterion_5_round_bound():
    assert _exhaustive_n6()["bound_violations"] == 0
    for n, p, seed in _score_property_corpus():
        g = gen_gnp(n, p, seed)
        verdict, _ = run_local(g, default_params(n), backend="passthrough")
        assert verdict.rounds_used <= max(g.n, 1)
    rng = random.Random(7)
    for index in range(1_000):
        n = rng.randint(1, 64)
        g = gen_chordal(n, seed=index)
        verdict, _ = run_local(g, default_params(n), backend="passthrough")
        assert verdict.outcome is Outcome.CHORDAL
        assert verdict.rounds_used <= n
    _report(5, "rounds <= max(n, 1) everywhere; 1000 random chordal graphs all CHORDAL within n rounds")


def _multi_round_graphs(count):
    out = []
    seed = 0
    while len(out) < count:
        seed += 1
        pick = seed % 3
        if pick == 0:
            g = builtin_graph(f"path-{4 + seed % 20}")
        elif pick == 1:
            g = gen_chordal(6 + seed % 12, seed)
        else:
            g = gen_gnp(5 + seed % 10, 0.4, seed)
        if len(oracles.simulate_protocol(g)[1]) >= 2:
            out.append(g)
    return out


def test_criterion_6_probabilistic_encryption_behaviors():
    pk, _ = keygen(default_params(8), "masked")
    rng = random.Random(0)
    payloads = {encrypt(pk, 5, rng).payload for _ in range(100)}
    assert len(payloads) == 100

    runs = 0
    for g in _multi_round_graphs(100):
        alice, payload = alice_init(g, default_params(g.n, seed=runs), backend="masked")
        bob = bob_init(payload)
        previous = payload.mask
        while True:
            outcome = alice_step(alice, bob_round(bob, previous))
            if not hasattr(outcome, "mask"):
                break
            for old, new in zip(previous.entries, outcome.mask.entries):
                assert old.payload != new.payload
            previous = outcome.mask
        assert alice.round >= 2
        runs += 1
    assert runs == 100
    _report(6, "100 distinct encryptions; all mask payloads changed between consecutive rounds in 100 runs")


def test_criterion_7_budget_semantics():
    g = builtin_graph("path-8")
    chordal, plain_rounds = oracles.simulate_protocol(g)
    assert chordal
    schedule = oracles.score_level_schedule(len(plain_rounds))
    assert schedule == [4, 6, 8, 10]
    abort_round = next(r for r, level in enumerate(schedule, start=1) if level > 9)

    verdict, _ = run_local(g, default_params(8, budget=9))
    assert verdict.outcome is Outcome.ABORTED
    assert verdict.rounds_used == abort_round == 4
    verdict, _ = run_local(g, default_params(8, budget=10))
    assert verdict.outcome is Outcome.CHORDAL
    assert verdict.rounds_used == len(plain_rounds)
    assert max(oracles.score_level_schedule(len(plain_rounds), refresh=True)) == 4
    verdict, _ = run_local(g, default_params(8, budget=4), refresh=True)
    assert verdict.outcome is Outcome.CHORDAL
    _report(7, "budget 9 aborts at round 4, budget 10 completes, refresh mode completes with budget 4")


def test_criterion_8_transport_transparency():
    params = default_params(16)
    server = BobServer(SessionConfig("127.0.0.1", 0), params, backend="masked")
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    mismatches = 0
    try:
        host, port = server.server_address[:2]
        cfg = SessionConfig(host, port)
        rng = random.Random(99)
        probabilities = itertools.cycle((0.1, 0.3, 0.6))
        for _ in range(100):
            g = gen_gnp(rng.randint(1, 16), next(probabilities), rng.randrange(2**32))
            seed = rng.randrange(2**32)
            session = default_params(16, seed=seed)
            net_verdict, net_transcript = connect(cfg, g, session)
            loc_verdict, loc_transcript = run_local(g, session)
            if (
                net_verdict != loc_verdict
                or [r.scores for r in net_transcript.rounds] != [r.scores for r in loc_transcript.rounds]
            ):
                mismatches += 1
    finally:
        server.shutdown()
        server.server_close()
    assert mismatches == 0
    _report(8, "100 loopback sessions identical to in-process runs (verdicts, rounds, scores)")


def test_criterion_9_cubic_scaling():
    started = time.perf_counter()

    def per_round_ms(n):
        g = builtin_graph(f"cycle-{n}")
        params = default_params(n)
        best = float("inf")
        for _ in range(3):
            _, transcript = run_local(g, params)
            best = min(best, sum(r.millis for r in transcript.rounds) / len(transcript.rounds))
        return best

    per_round_ms(32)  # warmup
    ms64 = per_round_ms(64)
    ms128 = per_round_ms(128)
    ratio = ms128 / ms64
    elapsed = time.perf_counter() - started
    assert elapsed < 600.0
    assert 5.0 <= ratio <= 12.0, f"per-round ratio {ratio:.2f} outside [5, 12] (64: {ms64:.1f}ms, 128: {ms128:.1f}ms)"
    _report(9, f"per-round time ratio n=128/n=64 = {ratio:.2f} in [5, 12] ({elapsed:.1f}s total)")
