"""Arithmetic over the characteristic-2 rings F2, F4, F2+uF2 and F4+uF4.

Every element is stored as a 4-bit payload holding the GF(2) coefficients of
the basis (1, w, u, uw), bit 0 first. F2 uses bit 0, F4 bits 0-1 and F2+uF2
bits 0 and 2, so all four rings are subrings of F4+uF4 under one encoding.
Addition is XOR of payloads; multiplication goes through a table built from
the relations u^2 = 0 and w^2 = 1 + w.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np


class RingError(ValueError):
    """Raised on mixed-ring operands or invalid ring data."""


class TokenError(RingError):
    """Raised when a token is not in the ring's alphabet."""

    def __init__(self, token: str, position: int, ring: "Ring"):
        self.token = token
        self.position = position
        self.ring = ring
        super().__init__(f"unknown token {token!r} at position {position} for ring {ring.value}")


class Ring(enum.Enum):
    F2 = "F2"
    F4 = "F4"
    F2uF2 = "F2uF2"
    F4uF4 = "F4uF4"

    @property
    def mask(self) -> int:
        return _MASKS[self]

    @property
    def size(self) -> int:
        return 1 << bin(self.mask).count("1")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(x for x in range(16) if x & ~self.mask == 0)

    @property
    def has_u(self) -> bool:
        return bool(self.mask & 0b0100)

    @property
    def residue(self) -> "Ring":
        """Residue field R/<u> (the ring itself when it has no u)."""
        return {Ring.F2uF2: Ring.F2, Ring.F4uF4: Ring.F4}.get(self, self)

    @property
    def additive_basis(self) -> tuple[int, ...]:
        """Payloads of the GF(2)-basis monomials present in this ring."""
        return tuple(b for b in (1, 2, 4, 8) if b & self.mask)

    def contains(self, bits: int) -> bool:
        return 0 <= bits < 16 and bits & ~self.mask == 0

    @classmethod
    def parse(cls, name: str) -> "Ring":
        key = name.strip().replace("+", "").replace(" ", "")
        aliases = {"F2": cls.F2, "F4": cls.F4, "F2uF2": cls.F2uF2, "F4uF4": cls.F4uF4}
        try:
            return aliases[key]
        except KeyError:
            raise RingError(f"unknown ring {name!r}") from None


_MASKS = {Ring.F2: 0b0001, Ring.F4: 0b0011, Ring.F2uF2: 0b0101, Ring.F4uF4: 0b1111}


def _monomial_product(x: int, y: int) -> int:
    # coefficient dict keyed by (power of w, power of u)
    terms: dict[tuple[int, int], int] = {}
    exps = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}
    for i, j in product(range(4), repeat=2):
        if (x >> i) & 1 and (y >> j) & 1:
            wi, ui = exps[i]
            wj, uj = exps[j]
            key = (wi + wj, ui + uj)
            terms[key] = terms.get(key, 0) ^ 1
    out = 0
    for (w_pow, u_pow), coeff in terms.items():
        if not coeff or u_pow >= 2:
            continue
        # w^2 = 1 + w
        w_part = {0: 0b01, 1: 0b10, 2: 0b11}[w_pow]
        out ^= w_part << (2 * u_pow)
    return out


def _build_mul_table() -> np.ndarray:
    table = np.zeros((16, 16), dtype=np.uint8)
    for x in range(16):
        for y in range(16):
            table[x, y] = _monomial_product(x, y)
    table.setflags(write=False)
    return table


MUL = _build_mul_table()


def _check_axioms(ring: Ring) -> None:
    els = ring.elements
    for x in els:
        if MUL[x, 1] != x:
            raise AssertionError(f"{ring}: 1 is not an identity for {x}")
        for y in els:
            if MUL[x, y] != MUL[y, x] or not ring.contains(int(MUL[x, y])):
                raise AssertionError(f"{ring}: table not commutative/closed at {x},{y}")
            for z in els:
                if MUL[MUL[x, y], z] != MUL[x, MUL[y, z]]:
                    raise AssertionError(f"{ring}: not associative at {x},{y},{z}")
                if MUL[x, y ^ z] != MUL[x, y] ^ MUL[x, z]:
                    raise AssertionError(f"{ring}: not distributive at {x},{y},{z}")


for _ring in Ring:
    _check_axioms(_ring)


# closed token alphabets
_F4U_LETTERS = {"z": 0, "a": 1, "b": 2, "c": 3}
_F4U_UPART = {1: 0, 2: 4, 3: 8, 4: 12}
TOKENS: dict[Ring, dict[str, int]] = {
    Ring.F2: {"0": 0, "1": 1},
    Ring.F4: {"0": 0, "1": 1, "w": 2, "W": 3},
    Ring.F2uF2: {"0": 0, "1": 1, "u": 4, "3": 5},
    Ring.F4uF4: {
        f"{letter}{i}": base | upart
        for letter, base in _F4U_LETTERS.items()
        for i, upart in _F4U_UPART.items()
    },
}
_NAMES = {ring: {bits: tok for tok, bits in table.items()} for ring, table in TOKENS.items()}


def describe(bits: int) -> str:
    """Human-readable polynomial form, e.g. ``1+w+u+uw``."""
    if bits == 0:
        return "0"
    parts = [name for b, name in ((1, "1"), (2, "w"), (4, "u"), (8, "uw")) if bits & b]
    return "+".join(parts)


@dataclass(frozen=True)
class RingElement:
    ring: Ring
    bits: int

    def __post_init__(self):
        if not self.ring.contains(self.bits):
            raise RingError(f"payload {self.bits:#06b} is not an element of {self.ring.value}")

    def _check(self, other: "RingElement") -> None:
        if not isinstance(other, RingElement):
            raise TypeError(f"expected RingElement, got {type(other).__name__}")
        if other.ring is not self.ring:
            raise RingError(f"ring mismatch: {self.ring.value} vs {other.ring.value}")

    def __add__(self, other: "RingElement") -> "RingElement":
        return ring_add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self, other)

    def __str__(self) -> str:
        return token(self.ring, self.bits)

    def __repr__(self) -> str:
        return f"RingElement({self.ring.value}, {describe(self.bits)})"

    def is_unit(self) -> bool:
        return any(MUL[self.bits, y] == 1 for y in self.ring.elements)


def element(ring: Ring, value: int | str) -> RingElement:
    if isinstance(value, str):
        return parse_element(value, ring)
    return RingElement(ring, value)


def ring_add(x: RingElement, y: RingElement) -> RingElement:
    x._check(y)
    return RingElement(x.ring, x.bits ^ y.bits)


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    x._check(y)
    return RingElement(x.ring, int(MUL[x.bits, y.bits]))


def token(ring: Ring, bits: int) -> str:
    return _NAMES[ring][bits]


def parse_element(tok: str, ring: Ring, position: int = 0) -> RingElement:
    try:
        return RingElement(ring, TOKENS[ring][tok.strip()])
    except KeyError:
        raise TokenError(tok, position, ring) from None


def units_square_one(ring: Ring) -> frozenset[RingElement]:
    """Units c of ``ring`` with c*c = 1, by exhaustive scan."""
    out = set()
    for x in ring.elements:
        is_unit = any(MUL[x, y] == 1 for y in ring.elements)
        if is_unit and MUL[x, x] == 1:
            out.add(RingElement(ring, x))
    return frozenset(out)


def inverse(x: RingElement) -> RingElement:
    for y in x.ring.elements:
        if MUL[x.bits, y] == 1:
            return RingElement(x.ring, y)
    raise RingError(f"{describe(x.bits)} is not a unit in {x.ring.value}")


def square_root(x: RingElement) -> RingElement | None:
    """Some y with y*y = x, or None."""
    for y in x.ring.elements:
        if MUL[y, y] == x.bits:
            return RingElement(x.ring, y)
    return None


# --------------------------------------------------------------------------
# vectors and matrices


def _as_payload(ring: Ring, data) -> np.ndarray:
    arr = np.array(data, dtype=np.int64)
    if ((arr < 0) | (arr > 15) | (arr & ~ring.mask & 0xF).astype(bool)).any():
        raise RingError(f"entries outside {ring.value}")
    arr = arr.astype(np.uint8)
    arr.setflags(write=False)
    return arr


class RingVector:
    """Immutable vector over one ring."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: Ring, data: Iterable[int] | np.ndarray):
        self.ring = ring
        self.data = _as_payload(ring, data).reshape(-1)

    @classmethod
    def from_elements(cls, elements: Sequence[RingElement]) -> "RingVector":
        if not elements:
            raise RingError("cannot infer ring of an empty element list")
        ring = elements[0].ring
        for e in elements:
            if e.ring is not ring:
                raise RingError("all entries of a vector must share a ring")
        return cls(ring, [e.bits for e in elements])

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, i: int) -> RingElement:
        return RingElement(self.ring, int(self.data[i]))

    def __iter__(self):
        return (RingElement(self.ring, int(b)) for b in self.data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingVector)
            and other.ring is self.ring
            and np.array_equal(other.data, self.data)
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.data.tobytes()))

    def __add__(self, other: "RingVector") -> "RingVector":
        _same_ring(self.ring, other.ring)
        if len(self) != len(other):
            raise RingError("length mismatch")
        return RingVector(self.ring, self.data ^ other.data)

    def scale(self, c: RingElement) -> "RingVector":
        _same_ring(self.ring, c.ring)
        return RingVector(self.ring, MUL[c.bits][self.data])

    def __repr__(self) -> str:
        return f"RingVector({self.ring.value}, {format_vector(self)})"


class RingMatrix:
    """Immutable row-major matrix over one ring."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: Ring, data):
        self.ring = ring
        arr = _as_payload(ring, data)
        if arr.ndim != 2:
            raise RingError("matrix data must be two-dimensional")
        self.data = arr

    @classmethod
    def from_rows(cls, rows: Sequence[RingVector]) -> "RingMatrix":
        if not rows:
            raise RingError("matrix needs at least one row")
        ring = rows[0].ring
        for r in rows:
            _same_ring(ring, r.ring)
        return cls(ring, np.stack([r.data for r in rows]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> RingVector:
        return RingVector(self.ring, self.data[i])

    def __iter__(self):
        return (self.row(i) for i in range(self.rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingMatrix)
            and other.ring is self.ring
            and np.array_equal(other.data, self.data)
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.data.shape, self.data.tobytes()))

    @property
    def T(self) -> "RingMatrix":
        return RingMatrix(self.ring, self.data.T)

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        _same_ring(self.ring, other.ring)
        return RingMatrix(self.ring, self.data ^ other.data)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        _same_ring(self.ring, other.ring)
        return RingMatrix(self.ring, matmul(self.data, other.data))

    def map(self, table: np.ndarray) -> "RingMatrix":
        return RingMatrix(self.ring, table[self.data])

    def __repr__(self) -> str:
        return f"RingMatrix({self.ring.value}, {self.rows}x{self.cols})"


def _same_ring(a: Ring, b: Ring) -> None:
    if a is not b:
        raise RingError(f"ring mismatch: {a.value} vs {b.value}")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of payload arrays; sums are XOR over the shared axis."""
    if a.shape[-1] != b.shape[0]:
        raise RingError(f"shape mismatch {a.shape} @ {b.shape}")
    prods = MUL[a[:, :, None], b[None, :, :]]
    return np.bitwise_xor.reduce(prods, axis=1).astype(np.uint8)


def identity(ring: Ring, n: int) -> RingMatrix:
    return RingMatrix(ring, np.eye(n, dtype=np.uint8))


def inner_product(x: RingVector, y: RingVector) -> RingElement:
    _same_ring(x.ring, y.ring)
    if len(x) != len(y):
        raise RingError(f"length mismatch: {len(x)} vs {len(y)}")
    return RingElement(x.ring, int(np.bitwise_xor.reduce(MUL[x.data, y.data], initial=0)))


def circulant(first_row: RingVector) -> RingMatrix:
    """Row i is ``first_row`` cyclically shifted right by i places."""
    n = len(first_row)
    if n == 0:
        raise RingError("circulant of an empty row")
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return RingMatrix(first_row.ring, first_row.data[idx])


def four_circulant(rA: RingVector, rB: RingVector) -> RingMatrix:
    """The 2n x 4n matrix [I_2n | A B ; B^T A^T] (self-duality not checked)."""
    _same_ring(rA.ring, rB.ring)
    if len(rA) != len(rB):
        raise RingError(f"rA and rB lengths differ: {len(rA)} vs {len(rB)}")
    A = circulant(rA).data
    B = circulant(rB).data
    right = np.block([[A, B], [B.T, A.T]])
    eye = np.eye(2 * len(rA), dtype=np.uint8)
    return RingMatrix(rA.ring, np.hstack([eye, right]))


# --------------------------------------------------------------------------
# text formats

_SINGLE_CHAR = {ring for ring, table in TOKENS.items() if all(len(t) == 1 for t in table)}


def parse_vector(text: str, ring: Ring) -> RingVector:
    """Parse ``(t1,t2,...)`` / ``[t1,...]`` or, for one-character alphabets, a bare string."""
    s = text.strip()
    if s[:1] in "([" and s[-1:] in ")]":
        s = s[1:-1].strip()
    if "," in s:
        toks = [t.strip() for t in s.split(",")]
    elif ring in _SINGLE_CHAR:
        toks = list(re.sub(r"\s+", "", s))
    else:
        toks = s.split()
    if not toks:
        raise RingError("empty vector")
    return RingVector(ring, [parse_element(t, ring, i).bits for i, t in enumerate(toks)])


def format_vector(v: RingVector, compact: bool = False) -> str:
    toks = [token(v.ring, int(b)) for b in v.data]
    if compact and v.ring in _SINGLE_CHAR:
        return "".join(toks)
    return "(" + ",".join(toks) + ")"
