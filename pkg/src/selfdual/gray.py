"""Gray maps from the rings down to binary vectors.

Each map sends a length-n vector to a length-2n vector. The pair ``(a, b)``
produced per symbol is laid out in block order: the full a-block first,
then the full b-block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rings import MUL, Ring, RingError, RingMatrix, RingVector


def _lut(fn: Callable[[int], tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    first = np.zeros(16, dtype=np.uint8)
    second = np.zeros(16, dtype=np.uint8)
    for x in range(16):
        first[x], second[x] = fn(x)
    return first, second


def _bit(x: int, i: int) -> int:
    return (x >> i) & 1


def _psi_f4_symbol(x: int) -> tuple[int, int]:
    # x = b + (a+b)w  <=>  x = a w + b (1+w)
    b = _bit(x, 0)
    a = _bit(x, 0) ^ _bit(x, 1)
    return a, b


def _phi_f2u_symbol(x: int) -> tuple[int, int]:
    a, b = _bit(x, 0), _bit(x, 2)
    return b, a ^ b


def _psi_f4u_symbol(x: int) -> tuple[int, int]:
    # coefficients of w and 1+w, each in F2+uF2 (payload bits 0 and 2)
    b0, b1 = _bit(x, 0), _bit(x, 2)
    a0, a1 = _bit(x, 1) ^ b0, _bit(x, 3) ^ b1
    return a0 | (a1 << 2), b0 | (b1 << 2)


def _phi_f4u_symbol(x: int) -> tuple[int, int]:
    a, b = x & 0b11, x >> 2
    return b, a ^ b


@dataclass(frozen=True)
class GrayMap:
    name: str
    domain: Ring
    codomain: Ring
    first: np.ndarray
    second: np.ndarray

    def apply_array(self, data: np.ndarray) -> np.ndarray:
        """Map payload arrays along the last axis (n -> 2n)."""
        return np.concatenate([self.first[data], self.second[data]], axis=-1)

    def __call__(self, v: RingVector) -> RingVector:
        if v.ring is not self.domain:
            raise RingError(f"{self.name} expects {self.domain.value}, got {v.ring.value}")
        return RingVector(self.codomain, self.apply_array(v.data))


MAPS: dict[str, GrayMap] = {
    "psi_f4": GrayMap("psi_f4", Ring.F4, Ring.F2, *_lut(_psi_f4_symbol)),
    "phi_f2u": GrayMap("phi_f2u", Ring.F2uF2, Ring.F2, *_lut(_phi_f2u_symbol)),
    "psi_f4u": GrayMap("psi_f4u", Ring.F4uF4, Ring.F2uF2, *_lut(_psi_f4u_symbol)),
    "phi_f4u": GrayMap("phi_f4u", Ring.F4uF4, Ring.F4, *_lut(_phi_f4u_symbol)),
}

psi_f4 = MAPS["psi_f4"]
phi_f2u = MAPS["phi_f2u"]
psi_f4u = MAPS["psi_f4u"]
phi_f4u = MAPS["phi_f4u"]


class GrayPath:
    """A composable chain of Gray maps ending in F2."""

    def __init__(self, steps: Sequence[str]):
        self.steps = tuple(steps)
        maps = []
        for name in self.steps:
            if name not in MAPS:
                raise RingError(f"unknown Gray map {name!r}")
            maps.append(MAPS[name])
        for left, right in zip(maps, maps[1:]):
            if left.codomain is not right.domain:
                raise RingError(
                    f"cannot compose {left.name} ({left.codomain.value}) "
                    f"with {right.name} ({right.domain.value})"
                )
        if maps and maps[-1].codomain is not Ring.F2:
            raise RingError("Gray path must terminate in F2")
        self._maps = maps

    @property
    def domain(self) -> Ring:
        return self._maps[0].domain if self._maps else Ring.F2

    def apply_array(self, data: np.ndarray) -> np.ndarray:
        for m in self._maps:
            data = m.apply_array(data)
        return data

    def __call__(self, v: RingVector) -> RingVector:
        if v.ring is not self.domain:
            raise RingError(f"path starts at {self.domain.value}, got {v.ring.value}")
        return RingVector(Ring.F2, self.apply_array(v.data))

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayPath) and other.steps == self.steps

    def __hash__(self) -> int:
        return hash(self.steps)

    def __repr__(self) -> str:
        return f"GrayPath({list(self.steps)})"


CANONICAL_PATHS = {
    Ring.F2: GrayPath([]),
    Ring.F4: GrayPath(["psi_f4"]),
    Ring.F2uF2: GrayPath(["phi_f2u"]),
    Ring.F4uF4: GrayPath(["psi_f4u", "phi_f2u"]),
}
ALTERNATE_F4UF4_PATH = GrayPath(["phi_f4u", "psi_f4"])


def canonical_path(ring: Ring) -> GrayPath:
    return CANONICAL_PATHS[ring]


def module_rows(G: RingMatrix) -> np.ndarray:
    """Rows s*r for every generator row r and additive basis scalar s.

    Their images span the binary image of the code generated by ``G``.
    """
    blocks = [MUL[s][G.data] for s in G.ring.additive_basis]
    return np.concatenate(blocks, axis=0)


def binary_image(G: RingMatrix, path: GrayPath | None = None):
    """Binary code spanned by the Gray images of the ring code generated by ``G``."""
    from .binary import BinaryCode

    path = path or canonical_path(G.ring)
    if path.domain is not G.ring:
        raise RingError(f"path starts at {path.domain.value}, generator is over {G.ring.value}")
    return BinaryCode(path.apply_array(module_rows(G)))


def lee_weight(v: RingVector) -> int:
    return int(canonical_path(v.ring).apply_array(v.data).sum())
