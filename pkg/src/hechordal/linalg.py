"""Ciphertext matrix/vector arithmetic for the chordality protocol.

The pipeline Bob runs each round, entirely on ciphertexts:

    squared  = mat_mul(A, A)          # entry [i][j]: number of 2-paths i -> j
    common   = hadamard(squared, A)   # 2-path counts restricted to edges
    score[i] = sum_j common[i][j] - d_i * (d_i - 1)   with d_i = sum_j A[i][j]

A score decrypts to 0 exactly when vertex i's surviving neighbourhood is a
clique (simplicial), and to a negative integer otherwise. apply_mask() zeroes
the rows and columns of removed vertices by multiplying with an encrypted 0/1
survival vector.

Operations are pure functions; results are bit-identical to folding the
scalar ciphertext ops entry by entry, but payload/level bookkeeping is done
on extracted lists so the cubic matrix product stays fast in pure Python.
"""
from __future__ import annotations

import operator
import random
from dataclasses import dataclass

from hechordal.backend import (
    PASSTHROUGH,
    BackendMismatchError,
    Ciphertext,
    PublicKey,
    SecretKey,
    decrypt,
    encrypt,
    min_plain_modulus,
)
from hechordal.graphs import Graph


@dataclass(frozen=True)
class CtMatrix:
    """Square dense matrix of ciphertexts, row-major, one shared backend/params."""

    n: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise ValueError(f"expected {self.n}x{self.n} ciphertexts")
        _check_uniform(c for row in self.rows for c in row)

    @property
    def tag(self):
        return self.rows[0][0].tag if self.n else None

    @property
    def params(self):
        return self.rows[0][0].params if self.n else None


@dataclass(frozen=True)
class CtVector:
    n: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.n:
            raise ValueError(f"expected {self.n} ciphertexts, got {len(self.entries)}")
        _check_uniform(self.entries)

    @property
    def tag(self):
        return self.entries[0].tag if self.n else None

    @property
    def params(self):
        return self.entries[0].params if self.n else None


def _check_uniform(cts) -> None:
    first = None
    for c in cts:
        if first is None:
            first = c
        elif c.tag != first.tag or (c.params is not first.params and c.params.digest != first.params.digest):
            raise BackendMismatchError("entries mix backends or parameter sets")


def _check_compat(a, b) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.n == 0:
        return
    if a.tag != b.tag or (a.params is not b.params and a.params.digest != b.params.digest):
        raise BackendMismatchError("operands come from different backends or parameter sets")


def encrypt_adjacency(pk: PublicKey, g: Graph, rng: random.Random) -> CtMatrix:
    """Entrywise probabilistic encryption of the 0/1 adjacency matrix."""
    if pk.params.t < min_plain_modulus(g.n):
        raise ValueError(
            f"plaintext modulus {pk.params.t} too small for n={g.n}; need t >= {min_plain_modulus(g.n)}"
        )
    adj = g.adjacency
    return CtMatrix(g.n, tuple(tuple(encrypt(pk, bit, rng) for bit in row) for row in adj))


def encrypt_vector(pk: PublicKey, values, rng: random.Random) -> CtVector:
    entries = tuple(encrypt(pk, v, rng) for v in values)
    return CtVector(len(entries), entries)


def decrypt_vector(sk: SecretKey, v: CtVector):
    return [decrypt(sk, c) for c in v.entries]


def decrypt_matrix(sk: SecretKey, m: CtMatrix):
    return [[decrypt(sk, c) for c in row] for row in m.rows]


def _dot(xs, ys) -> int:
    return sum(map(operator.mul, xs, ys))


def mat_mul(x: CtMatrix, y: CtMatrix) -> CtMatrix:
    """Textbook cubic matrix product; entry level = max input level + 1."""
    _check_compat(x, y)
    n = x.n
    if n == 0:
        return CtMatrix(0, ())
    tag, params = x.tag, x.params
    q = None if tag == PASSTHROUGH else params.q
    x_pay = [[c.payload for c in row] for row in x.rows]
    y_cols = list(zip(*[[c.payload for c in row] for row in y.rows]))
    x_rowmax = [max(c.level for c in row) for row in x.rows]
    y_colmax = [max(col) for col in zip(*[[c.level for c in row] for row in y.rows])]
    rows = []
    for i in range(n):
        xrow = x_pay[i]
        base = x_rowmax[i]
        out = []
        for j in range(n):
            p = _dot(xrow, y_cols[j])
            if q is not None:
                p %= q
            lvl = (base if base >= y_colmax[j] else y_colmax[j]) + 1
            out.append(Ciphertext(tag, lvl, p, params))
        rows.append(tuple(out))
    return CtMatrix(n, tuple(rows))


def hadamard(x: CtMatrix, y: CtMatrix) -> CtMatrix:
    """Element-wise product."""
    _check_compat(x, y)
    if x.n == 0:
        return CtMatrix(0, ())
    tag, params = x.tag, x.params
    q = None if tag == PASSTHROUGH else params.q
    rows = []
    for xrow, yrow in zip(x.rows, y.rows):
        out = []
        for a, b in zip(xrow, yrow):
            p = a.payload * b.payload
            if q is not None:
                p %= q
            lvl = (a.level if a.level >= b.level else b.level) + 1
            out.append(Ciphertext(tag, lvl, p, params))
        rows.append(tuple(out))
    return CtMatrix(x.n, tuple(rows))


def apply_mask(a: CtMatrix, s: CtVector) -> CtMatrix:
    """Zero row i and column i whenever s[i] encrypts 0: entry <- A[i][j]*s[i]*s[j].

    Two sequential multiplications, so every entry's level grows by 2 over
    max(entry, mask) levels.
    """
    _check_compat(a, s)
    if a.n == 0:
        return CtMatrix(0, ())
    tag, params = a.tag, a.params
    q = None if tag == PASSTHROUGH else params.q
    s_pay = [c.payload for c in s.entries]
    s_lvl = [c.level for c in s.entries]
    rows = []
    for i, arow in enumerate(a.rows):
        si_p, si_l = s_pay[i], s_lvl[i]
        out = []
        for j, c in enumerate(arow):
            p = c.payload * si_p * s_pay[j]
            if q is not None:
                p %= q
            inner = (c.level if c.level >= si_l else si_l) + 1
            lvl = (inner if inner >= s_lvl[j] else s_lvl[j]) + 1
            out.append(Ciphertext(tag, lvl, p, params))
        rows.append(tuple(out))
    return CtMatrix(a.n, tuple(rows))


def simplicial_scores(a: CtMatrix) -> CtVector:
    """Per-vertex clique-neighbourhood score vector (0 = simplicial, < 0 otherwise).

    The row sum of A is computed once per vertex and reused for the d*(d-1)
    term, keeping the whole pass at O(n^3) ciphertext operations.
    """
    n = a.n
    if n == 0:
        return CtVector(0, ())
    squared = mat_mul(a, a)
    common = hadamard(squared, a)
    tag, params = a.tag, a.params
    q = None if tag == PASSTHROUGH else params.q
    entries = []
    for i in range(n):
        m_row = common.rows[i]
        a_row = a.rows[i]
        m_sum = sum(c.payload for c in m_row)
        m_lvl = max(c.level for c in m_row)
        d_sum = sum(c.payload for c in a_row)
        d_lvl = max(c.level for c in a_row)
        # score = m_sum - d*(d-1); the subtraction of the plaintext constant 1
        # leaves the level alone, the product adds one.
        p = m_sum - d_sum * (d_sum - 1)
        if q is not None:
            p %= q
        prod_lvl = d_lvl + 1
        lvl = m_lvl if m_lvl >= prod_lvl else prod_lvl
        entries.append(Ciphertext(tag, lvl, p, params))
    return CtVector(n, tuple(entries))
