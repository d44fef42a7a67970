"""Simulated homomorphic-encryption backends.

Two interchangeable backends sit behind one contract:

* ``passthrough`` -- ciphertexts carry the plaintext unchanged; useful for
  testing protocol logic with zero crypto noise.
* ``masked`` (masked-residue) -- a ciphertext for plaintext m is
  ``(m mod t) + t*r mod q`` with r drawn uniformly from [0, q/t) and q a
  multiple of t. Addition/subtraction/multiplication mod q preserve the
  residue mod t exactly, so results decrypt correctly as long as the true
  plaintext value stays inside the centered range (-t/2, t/2].

Neither backend is cryptographically secure; the masked-residue scheme merely
*behaves* like a leveled HE scheme. Exhaustion of the multiplicative-depth
budget is modeled by an explicit per-ciphertext level counter (encrypt = 0,
add/sub = max, mul = max + 1) checked at decryption time; the same integer
operations serve both the plaintext and ciphertext spaces.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from functools import cached_property

PASSTHROUGH = 0x01
MASKED_RESIDUE = 0x02

_BACKEND_TAGS = {
    "passthrough": PASSTHROUGH,
    "masked": MASKED_RESIDUE,
    "masked-residue": MASKED_RESIDUE,
}
_TAG_NAMES = {PASSTHROUGH: "passthrough", MASKED_RESIDUE: "masked"}


class BackendMismatchError(ValueError):
    """Operands come from different backends or parameter sets."""


class BudgetExceededError(Exception):
    """Decryption failed: ciphertext level exceeds the multiplicative-depth budget."""


@dataclass(frozen=True)
class HeParams:
    """Scheme parameters. ``budget=None`` means unbounded depth.

    ``seed`` controls the caller-side encryption randomness stream only; it is
    deliberately excluded from the parameter digest so that two parties with
    different seeds still negotiate successfully.
    """

    t: int
    q: int
    budget: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.t < 2:
            raise ValueError(f"plaintext modulus t must be >= 2, got {self.t}")
        if self.q % self.t != 0:
            raise ValueError(f"q ({self.q}) must be a multiple of t ({self.t})")
        if self.q // self.t < 2:
            raise ValueError("q/t must be >= 2 to leave room for randomization")
        if self.budget is not None and self.budget < 1:
            raise ValueError(f"budget must be a positive integer or None, got {self.budget}")

    @cached_property
    def digest(self) -> bytes:
        budget = "unbounded" if self.budget is None else str(self.budget)
        return hashlib.sha256(f"t={self.t};q={self.q};budget={budget}".encode()).digest()

    @property
    def plaintext_bound(self) -> int:
        """Largest magnitude representable in the centered range (-t/2, t/2]."""
        return (self.t - 1) // 2


def min_plain_modulus(n: int) -> int:
    """Smallest t that leaves 2x headroom for all protocol intermediates.

    Every value the protocol produces is bounded by n*(n-1) in magnitude, so
    t >= 4n^2 + 1 keeps the centered range at least twice as wide as needed.
    """
    return 4 * n * n + 1


def default_params(n: int, budget: int | None = None, seed: int = 0) -> HeParams:
    """Parameters sized for graphs with up to n vertices: t the next power of
    two >= 4n^2+1, q = t * 2^64."""
    need = max(4, min_plain_modulus(n))
    t = 1 << (need - 1).bit_length()
    return HeParams(t=t, q=t << 64, budget=budget, seed=seed)


@dataclass(frozen=True)
class PublicKey:
    tag: int
    params: HeParams


@dataclass(frozen=True)
class SecretKey:
    tag: int
    params: HeParams


@dataclass(frozen=True, slots=True)
class Ciphertext:
    """Opaque encrypted integer with a multiplicative-depth level counter.

    Masked-residue payloads are canonical integers in [0, q); passthrough
    payloads hold the raw (possibly negative) value. The params reference is
    excluded from equality so that a decoded wire ciphertext compares equal to
    the one that was sent.
    """

    tag: int
    level: int
    payload: int
    params: HeParams = field(compare=False, repr=False)


def backend_tag(name: str) -> int:
    try:
        return _BACKEND_TAGS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}, expected one of {sorted(_BACKEND_TAGS)}") from None


def backend_name(tag: int) -> str:
    try:
        return _TAG_NAMES[tag]
    except KeyError:
        raise ValueError(f"unknown backend tag {tag:#x}") from None


def keygen(params: HeParams, backend: str = "masked"):
    """Matched (PublicKey, SecretKey) pair for the given backend."""
    tag = backend_tag(backend)
    return PublicKey(tag, params), SecretKey(tag, params)


def encrypt(pk: PublicKey, m: int, rng: random.Random) -> Ciphertext:
    """Probabilistic encryption of a centered-range integer at level 0."""
    params = pk.params
    if abs(m) > params.plaintext_bound:
        raise ValueError(f"plaintext {m} outside the centered range +-{params.plaintext_bound}")
    if pk.tag == PASSTHROUGH:
        payload = m
    else:
        payload = (m % params.t) + params.t * rng.randrange(params.q // params.t)
    return Ciphertext(pk.tag, 0, payload, params)


def decrypt(sk: SecretKey, c: Ciphertext) -> int:
    """Centered plaintext of c; fails if c's level exceeds the depth budget."""
    if not isinstance(sk, SecretKey):
        raise TypeError(f"decryption requires a SecretKey, got {type(sk).__name__}")
    if c.tag != sk.tag or c.params.digest != sk.params.digest:
        raise BackendMismatchError("ciphertext does not match this secret key's backend/params")
    budget = sk.params.budget
    if budget is not None and c.level > budget:
        raise BudgetExceededError(f"ciphertext level {c.level} exceeds depth budget {budget}")
    if c.tag == PASSTHROUGH:
        return c.payload
    return _centered(c.payload % sk.params.t, sk.params.t)


def _centered(r: int, modulus: int) -> int:
    return r - modulus if 2 * r > modulus else r


def _check_pair(a: Ciphertext, b: Ciphertext) -> None:
    if a.tag != b.tag:
        raise BackendMismatchError(f"backend mismatch: {a.tag:#x} vs {b.tag:#x}")
    if a.params is not b.params and a.params.digest != b.params.digest:
        raise BackendMismatchError("ciphertexts were produced under different parameters")


def add(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    _check_pair(a, b)
    level = a.level if a.level >= b.level else b.level
    payload = a.payload + b.payload
    if a.tag != PASSTHROUGH:
        payload %= a.params.q
    return Ciphertext(a.tag, level, payload, a.params)


def sub(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    _check_pair(a, b)
    level = a.level if a.level >= b.level else b.level
    payload = a.payload - b.payload
    if a.tag != PASSTHROUGH:
        payload %= a.params.q
    return Ciphertext(a.tag, level, payload, a.params)


def mul(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    _check_pair(a, b)
    level = (a.level if a.level >= b.level else b.level) + 1
    payload = a.payload * b.payload
    if a.tag != PASSTHROUGH:
        payload %= a.params.q
    return Ciphertext(a.tag, level, payload, a.params)


def sub_plain(a: Ciphertext, k: int) -> Ciphertext:
    """Subtract a plaintext constant; level is unchanged."""
    if abs(k) > a.params.plaintext_bound:
        raise ValueError(f"constant {k} outside the centered range +-{a.params.plaintext_bound}")
    payload = a.payload - k
    if a.tag != PASSTHROUGH:
        payload %= a.params.q
    return Ciphertext(a.tag, a.level, payload, a.params)


def serialize_ciphertext(c: Ciphertext) -> bytes:
    """tag (1B) | level (4B BE) | payload length (4B BE) | payload magnitude bytes.

    The serialized payload is always the canonical representative in [0, q).
    """
    value = c.payload % c.params.q if c.tag == PASSTHROUGH else c.payload
    raw = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return bytes((c.tag,)) + c.level.to_bytes(4, "big") + len(raw).to_bytes(4, "big") + raw


def deserialize_ciphertext(data, offset: int, params: HeParams):
    """Parse one ciphertext at data[offset:]; returns (Ciphertext, next offset)."""
    if offset + 9 > len(data):
        raise ValueError("truncated ciphertext header")
    tag = data[offset]
    if tag not in _TAG_NAMES:
        raise ValueError(f"unknown ciphertext backend tag {tag:#x}")
    level = int.from_bytes(data[offset + 1 : offset + 5], "big")
    length = int.from_bytes(data[offset + 5 : offset + 9], "big")
    end = offset + 9 + length
    if end > len(data):
        raise ValueError("truncated ciphertext payload")
    value = int.from_bytes(data[offset + 9 : end], "big")
    if value >= params.q:
        raise ValueError("ciphertext payload out of range [0, q)")
    if tag == PASSTHROUGH:
        value = _centered(value, params.q)
    return Ciphertext(tag, level, value, params), end
