"""Bit-packed binary linear codes and GF(2) elimination."""

from __future__ import annotations

from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class CodeError(ValueError):
    """Invalid binary code input (zero code, odd length where forbidden, ...)."""


def pack_ints(rows: Sequence[int], n: int) -> np.ndarray:
    W = max(1, (n + 63) // 64)
    out = np.zeros((len(rows), W), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, r in enumerate(rows):
        for w in range(W):
            out[i, w] = (r >> (64 * w)) & mask
    return out


def unpack_words(words: np.ndarray, n: int) -> list[int]:
    out = []
    for row in words:
        v = 0
        for w, x in enumerate(row):
            v |= int(x) << (64 * w)
        out.append(v)
    return out


def bits_to_int(bits: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b:
            v |= 1 << j
    return v


def int_to_bits(v: int, n: int) -> np.ndarray:
    return np.array([(v >> j) & 1 for j in range(n)], dtype=np.uint8)


def systematize(rows: Sequence[int], column_order: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form, choosing pivots by ``column_order``.

    Returns ``(rows, pivots)`` with one row per pivot; every row is zero on
    every other row's pivot column.
    """
    work = [r for r in rows if r]
    basis: list[int] = []
    pivots: list[int] = []
    for col in column_order:
        bit = 1 << col
        hit = next((i for i, r in enumerate(work) if r & bit), None)
        if hit is None:
            continue
        p = work.pop(hit)
        work = [r ^ p if r & bit else r for r in work]
        basis = [r ^ p if r & bit else r for r in basis]
        basis.append(p)
        pivots.append(col)
        work = [r for r in work if r]
        if not work:
            break
    return basis, pivots


class BinaryCode:
    """Binary linear code kept as a reduced basis.

    ``generator`` is a 0/1 matrix (rows = generators) or, with ``n`` given,
    a sequence of integer bitsets with coordinate j at bit j.
    """

    def __init__(self, generator, n: int | None = None):
        if n is None:
            arr = np.asarray(generator, dtype=np.uint8)
            if arr.ndim != 2:
                raise CodeError("generator must be a 2-D 0/1 matrix")
            n = arr.shape[1]
            ints = [bits_to_int(row) for row in arr]
        else:
            ints = [int(r) for r in generator]
            if any(r >> n for r in ints):
                raise CodeError(f"generator rows exceed length {n}")
        if n <= 0:
            raise CodeError("code length must be positive")
        if n > 1 << 16:
            raise CodeError("length above 2^16 is not supported")
        self.n = n
        self.generator_rows = tuple(ints)
        rows, pivots = systematize(ints, range(n))
        if not rows:
            raise CodeError("generator spans the zero code")
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)
        self.k = len(rows)

    @classmethod
    def from_text(cls, text: str) -> "BinaryCode":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise CodeError("empty matrix text")
        n = len(lines[0])
        for i, ln in enumerate(lines, 1):
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise CodeError(f"line {i}: expected {n} characters from '01'")
        return cls([[int(ch) for ch in ln] for ln in lines])

    @classmethod
    def from_file(cls, path: str | Path) -> "BinaryCode":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "\n".join("".join(str(b) for b in int_to_bits(r, self.n)) for r in self.rows) + "\n"

    @property
    def words_per_row(self) -> int:
        return max(1, (self.n + 63) // 64)

    @cached_property
    def packed(self) -> np.ndarray:
        return pack_ints(self.rows, self.n)

    def matrix(self) -> np.ndarray:
        return np.array([int_to_bits(r, self.n) for r in self.rows], dtype=np.uint8)

    @cached_property
    def information_sets(self) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
        """Information sets chosen greedily to be as disjoint as possible.

        Each entry is ``(rows, pivots, fresh)``: a basis systematic on
        ``pivots`` and the number of pivots unused by every earlier set.
        """
        sets = [(self.rows, self.pivots, self.k)]
        used = set(self.pivots)
        while len(used) < self.n:
            fresh = [j for j in range(self.n) if j not in used]
            order = fresh + sorted(used)
            rows, pivots = systematize(self.rows, order)
            r = sum(1 for p in pivots if p not in used)
            if r == 0:
                break
            sets.append((tuple(rows), tuple(pivots), r))
            used.update(pivots)
        return sets

    def is_self_orthogonal(self) -> bool:
        return all((a & b).bit_count() % 2 == 0 for i, a in enumerate(self.rows) for b in self.rows[i:])

    def is_self_dual(self) -> bool:
        return 2 * self.k == self.n and self.is_self_orthogonal()

    def encode(self, message: int) -> int:
        cw = 0
        for i, r in enumerate(self.rows):
            if (message >> i) & 1:
                cw ^= r
        return cw

    def permuted(self, perm: Sequence[int]) -> "BinaryCode":
        """Code with coordinate j moved to position ``perm[j]``."""
        out = []
        for r in self.rows:
            v = 0
            for j in range(self.n):
                if (r >> j) & 1:
                    v |= 1 << perm[j]
            out.append(v)
        return BinaryCode(out, self.n)

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryCode) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"BinaryCode([{self.n},{self.k}])"


def rank_and_systematize(rows, n: int | None = None) -> BinaryCode:
    """Gaussian elimination over GF(2); pivots form the first information set."""
    return BinaryCode(rows, n)
