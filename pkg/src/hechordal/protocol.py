"""Alice/Bob state machines for interactive chordality checking.

Alice owns the graph, both keys, and the plaintext 0/1 survival mask. Bob
holds only the encrypted adjacency matrix and performs one scoring pass per
round. A round is one Bob evaluation plus one Alice decrypt/normalize step;
the first (all-ones) encrypted mask travels with the init payload.

Alice stops with CHORDAL when the mask becomes all zeros, and with
NOT_CHORDAL when a round removes nothing (the surviving count fails to
drop below the previous one). A run therefore takes at most n rounds.

Depth profile: with level-0 inputs, the round-r score vector carries level
2r + 2 (each round's masking adds 2 to Bob's matrix, scoring adds 2 more).
In refresh mode Alice also hands Bob a fresh level-0 encryption of the
currently-masked matrix every round, pinning the score level at 4.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from enum import Enum

from hechordal.backend import (
    BudgetExceededError,
    HeParams,
    PublicKey,
    SecretKey,
    decrypt,
    encrypt,
    keygen,
)
from hechordal.graphs import Graph
from hechordal.linalg import (
    CtMatrix,
    CtVector,
    apply_mask,
    encrypt_adjacency,
    encrypt_vector,
    simplicial_scores,
)


class Outcome(Enum):
    CHORDAL = "CHORDAL"
    NOT_CHORDAL = "NOT_CHORDAL"
    ABORTED = "ABORTED"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    rounds_used: int
    reason: str | None = None


@dataclass
class RoundRecord:
    round: int
    scores: list
    mask: list
    surviving: int
    bytes_sent: int = 0
    bytes_received: int = 0
    millis: float = 0.0


@dataclass
class Transcript:
    rounds: list = field(default_factory=list)
    verdict: Verdict | None = None

    def to_json_lines(self) -> str:
        lines = []
        for r in self.rounds:
            lines.append(
                json.dumps(
                    {
                        "round": r.round,
                        "scores": r.scores,
                        "mask": r.mask,
                        "surviving": r.surviving,
                        "bytes_sent": r.bytes_sent,
                        "bytes_received": r.bytes_received,
                        "millis": r.millis,
                    }
                )
            )
        if self.verdict is not None:
            final = {"verdict": self.verdict.outcome.value, "rounds_used": self.verdict.rounds_used}
            if self.verdict.reason is not None:
                final["reason"] = self.verdict.reason
            lines.append(json.dumps(final))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class InitPayload:
    """Everything Bob needs to start: public key data, n, ciphertexts only."""

    n: int
    pk: PublicKey
    adjacency: CtMatrix
    mask: CtVector


@dataclass
class AliceState:
    pk: PublicKey
    sk: SecretKey
    graph: Graph
    n: int
    mask: list
    k_prev: int
    rng: random.Random
    refresh: bool = False
    round: int = 0
    transcript: Transcript = field(default_factory=Transcript)


@dataclass
class BobState:
    pk: PublicKey
    n: int
    adjacency: CtMatrix
    round: int = 0


@dataclass(frozen=True)
class NextMask:
    mask: CtVector
    refreshed_adjacency: CtMatrix | None = None


def alice_init(g: Graph, params: HeParams, backend: str = "masked", refresh: bool = False):
    """Key generation plus the initial payload (encrypted matrix, all-ones mask)."""
    pk, sk = keygen(params, backend)
    rng = random.Random(params.seed)
    adjacency = encrypt_adjacency(pk, g, rng)
    mask = [1] * g.n
    payload = InitPayload(g.n, pk, adjacency, encrypt_vector(pk, mask, rng))
    state = AliceState(pk=pk, sk=sk, graph=g, n=g.n, mask=mask, k_prev=g.n + 1, rng=rng, refresh=refresh)
    return state, payload


def bob_init(payload: InitPayload) -> BobState:
    return BobState(pk=payload.pk, n=payload.n, adjacency=payload.adjacency)


def bob_round(bob: BobState, masked_s: CtVector) -> CtVector:
    """Apply the survival mask to Bob's matrix, then score every vertex.

    Mutates bob: the masked matrix is kept for the next round. Ciphertext
    operations only; one round costs O(n^3) ciphertext multiplications.
    """
    if masked_s.n != bob.n:
        raise ValueError(f"mask length {masked_s.n} != n = {bob.n}")
    bob.adjacency = apply_mask(bob.adjacency, masked_s)
    bob.round += 1
    return simplicial_scores(bob.adjacency)


def alice_step(state: AliceState, scores: CtVector):
    """Decrypt one round of scores and either continue or stop.

    Returns a NextMask (freshly encrypted survival vector, every entry
    re-encrypted including the zeros) or a final Verdict. A failed decrypt
    due to depth-budget exhaustion yields ABORTED rather than a guess.
    """
    if scores.n != state.n:
        raise ValueError(f"score vector length {scores.n} != n = {state.n}")
    # Survivor count of the mask Bob just used; the comparison below is
    # against this, so a round that removes nothing terminates immediately.
    state.k_prev = sum(state.mask)
    round_index = state.round + 1
    try:
        decrypted = [decrypt(state.sk, c) for c in scores.entries]
    except BudgetExceededError:
        verdict = Verdict(Outcome.ABORTED, round_index, f"budget exceeded at round {round_index}")
        state.transcript.verdict = verdict
        return verdict
    new_mask = [0 if d == 0 else 1 for d in decrypted]
    surviving = sum(new_mask)
    state.round = round_index
    state.mask = new_mask
    state.transcript.rounds.append(RoundRecord(round_index, decrypted, list(new_mask), surviving))
    if surviving == 0:
        verdict = Verdict(Outcome.CHORDAL, round_index)
        state.transcript.verdict = verdict
        return verdict
    if surviving >= state.k_prev:
        verdict = Verdict(Outcome.NOT_CHORDAL, round_index)
        state.transcript.verdict = verdict
        return verdict
    fresh = encrypt_vector(state.pk, new_mask, state.rng)
    refreshed = _refresh_adjacency(state) if state.refresh else None
    return NextMask(fresh, refreshed)


def _refresh_adjacency(state: AliceState) -> CtMatrix:
    """Fresh level-0 encryption of the adjacency with masked rows/columns zeroed."""
    adj = state.graph.adjacency
    mask = state.mask
    rows = tuple(
        tuple(encrypt(state.pk, bit * mask[i] * mask[j], state.rng) for j, bit in enumerate(row))
        for i, row in enumerate(adj)
    )
    return CtMatrix(state.n, rows)


def expected_score_level(round_index: int, refresh: bool) -> int:
    return 4 if refresh else 2 * round_index + 2


def run_local(g: Graph, params: HeParams, backend: str = "masked", refresh: bool = False):
    """Drive a whole session in one process; returns (Verdict, Transcript)."""
    alice, payload = alice_init(g, params, backend=backend, refresh=refresh)
    if g.n == 0:
        verdict = Verdict(Outcome.CHORDAL, 0)
        alice.transcript.verdict = verdict
        return verdict, alice.transcript
    bob = bob_init(payload)
    mask_ct = payload.mask
    while True:
        started = time.perf_counter()
        scores = bob_round(bob, mask_ct)
        want = expected_score_level(bob.round, refresh)
        assert all(c.level == want for c in scores.entries), "depth accounting drifted"
        result = alice_step(alice, scores)
        elapsed = (time.perf_counter() - started) * 1000.0
        if alice.transcript.rounds and alice.transcript.rounds[-1].round == bob.round:
            alice.transcript.rounds[-1].millis = elapsed
        if isinstance(result, Verdict):
            return result, alice.transcript
        mask_ct = result.mask
        if result.refreshed_adjacency is not None:
            bob.adjacency = result.refreshed_adjacency
