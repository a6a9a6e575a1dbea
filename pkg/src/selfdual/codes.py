"""Linear codes over the rings: self-duality, projection, lifts and extensions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .gray import MAPS, binary_image
from .rings import (
    MUL,
    Ring,
    RingElement,
    RingError,
    RingMatrix,
    RingVector,
    circulant,
    format_vector,
    four_circulant,
    identity,
    inner_product,
    matmul,
    token,
    units_square_one,
)


class ExtensionError(ValueError):
    """A precondition of an extension construction does not hold.

    ``kind`` is one of ``not-self-dual``, ``bad-X``, ``bad-c``,
    ``non-systematic`` or ``postcondition``.
    """

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


@dataclass(frozen=True, eq=False)
class RingCode:
    generator: RingMatrix
    provenance: dict = field(default_factory=dict)
    name: str | None = None

    @property
    def ring(self) -> Ring:
        return self.generator.ring

    @property
    def length(self) -> int:
        return self.generator.cols

    def binary_image(self, path=None):
        return binary_image(self.generator, path)

    def ref(self) -> dict:
        """Self-contained provenance: enough to rebuild this code from scratch."""
        out = dict(self.provenance)
        if self.name:
            out["name"] = self.name
        return out

    def __repr__(self) -> str:
        label = self.name or self.provenance.get("construction", "code")
        return f"RingCode({label}, {self.ring.value}, {self.generator.rows}x{self.length})"


@dataclass(frozen=True)
class ExtensionParams:
    theorem: str
    X: RingVector
    c: RingElement

    def __post_init__(self):
        if self.theorem not in ("A", "B"):
            raise ValueError(f"theorem must be 'A' or 'B', got {self.theorem!r}")


# --------------------------------------------------------------------------
# self-duality


def gram(G: RingMatrix) -> RingMatrix:
    return G @ G.T


def is_self_orthogonal(C: RingCode) -> bool:
    return not gram(C.generator).data.any()


def is_self_dual(C: RingCode) -> bool:
    """G G^T = 0 and the binary image has dimension half its length.

    Gray maps preserve orthogonality and size, so this is equivalent to
    C being self-dual.
    """
    if not is_self_orthogonal(C):
        return False
    image = C.binary_image()
    return 2 * image.k == image.n


def check_four_circulant_condition(rA: RingVector, rB: RingVector) -> bool:
    """True iff A A^T + B B^T = I for the circulants of ``rA`` and ``rB``."""
    if rA.ring is not rB.ring:
        raise RingError(f"ring mismatch: {rA.ring.value} vs {rB.ring.value}")
    if len(rA) != len(rB):
        raise RingError("rA and rB must have equal length")
    A, B = circulant(rA), circulant(rB)
    return (A @ A.T + B @ B.T) == identity(rA.ring, len(rA))


def four_circulant_code(rA: RingVector, rB: RingVector, name: str | None = None) -> RingCode:
    return RingCode(
        four_circulant(rA, rB),
        {"construction": "four_circulant", "ring": rA.ring.value,
         "rA": format_vector(rA), "rB": format_vector(rB)},
        name,
    )


# --------------------------------------------------------------------------
# projection and lifts

# u-part offsets in label order 1..4: 0, u, uw, u+uw
_U_OFFSETS = {Ring.F2: (0, 4), Ring.F4: (0, 4, 8, 12)}
_LIFT_RING = {Ring.F2: Ring.F2uF2, Ring.F4: Ring.F4uF4}


def _mu_table(ring: Ring) -> np.ndarray:
    return np.array([x & ring.residue.mask for x in range(16)], dtype=np.uint8)


def project_mu(C: RingCode) -> RingCode:
    """Reduce every generator entry modulo u."""
    if not C.ring.has_u:
        raise RingError(f"{C.ring.value} has no u to project away")
    target = C.ring.residue
    G = RingMatrix(target, _mu_table(C.ring)[C.generator.data])
    prov = {"construction": "projection", "base": C.ref()}
    return RingCode(G, prov, None)


def project_vector(v: RingVector) -> RingVector:
    return RingVector(v.ring.residue, _mu_table(v.ring)[v.data])


def lift_ring(ring: Ring) -> Ring:
    try:
        return _LIFT_RING[ring]
    except KeyError:
        raise RingError(f"no lift defined from {ring.value}") from None


def _seeds(C: RingCode) -> tuple[RingVector, RingVector]:
    if C.provenance.get("construction") not in ("four_circulant", "lift"):
        raise RingError("lifts need a four-circulant code (provenance lacks rA/rB)")
    from .rings import parse_vector

    return parse_vector(C.provenance["rA"], C.ring), parse_vector(C.provenance["rB"], C.ring)


def lift_from_indices(Cf: RingCode, indices) -> tuple[RingVector, RingVector]:
    rA, rB = _seeds(Cf)
    offsets = np.array(_U_OFFSETS[Cf.ring], dtype=np.uint8)
    seeds = np.concatenate([rA.data, rB.data])
    lifted = seeds ^ offsets[np.asarray(indices, dtype=np.int64)]
    n = len(rA)
    target = lift_ring(Cf.ring)
    return RingVector(target, lifted[:n]), RingVector(target, lifted[n:])


def enumerate_lifts(
    Cf: RingCode,
    mode: str = "exhaustive",
    seed: int | None = None,
    budget: int | None = None,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[RingCode]:
    """Four-circulant codes over R+uR whose projection is ``Cf``.

    Exhaustive mode walks preimage-index vectors (rA entries then rB
    entries, first entry most significant) in lexicographic order, from
    ``start`` up to ``stop``. Random mode draws ``budget`` index vectors
    from a generator seeded with ``seed``.
    """
    rA, _ = _seeds(Cf)
    q = len(_U_OFFSETS[Cf.ring])
    m = 2 * len(rA)
    if mode == "exhaustive":
        total = q**m
        stop = total if stop is None else min(stop, total)
        it = itertools.islice(itertools.product(range(q), repeat=m), start, stop)
        numbered = zip(itertools.count(start), it)
    elif mode == "random":
        if seed is None or budget is None:
            raise ValueError("random lift mode needs seed and budget")
        rng = np.random.default_rng(seed)
        numbered = ((i, tuple(rng.integers(0, q, size=m))) for i in range(budget))
    else:
        raise ValueError(f"unknown lift mode {mode!r}")
    for index, idx in numbered:
        lA, lB = lift_from_indices(Cf, idx)
        yield lift_code(Cf, lA, lB, index=int(index))


def lift_code(Cf: RingCode, rA: RingVector, rB: RingVector, name: str | None = None, index: int | None = None) -> RingCode:
    """Four-circulant code on lifted seeds, checked to project onto ``Cf``."""
    base_A, base_B = _seeds(Cf)
    if rA.ring is not lift_ring(Cf.ring) or rB.ring is not rA.ring:
        raise RingError(f"lift seeds must lie in {lift_ring(Cf.ring).value}")
    if project_vector(rA) != base_A or project_vector(rB) != base_B:
        raise RingError(f"seeds do not project onto the seeds of {Cf.name or 'the base code'}")
    prov = {"construction": "lift", "ring": rA.ring.value, "base": Cf.ref(),
            "rA": format_vector(rA), "rB": format_vector(rB)}
    if index is not None:
        prov["lift_index"] = index
    return RingCode(four_circulant(rA, rB), prov, name)


# --------------------------------------------------------------------------
# Gray images as ring codes

# scalars whose multiples of the generator rows span the image as a module
_MODULE_SCALARS = {"psi_f4u": (1, 2), "phi_f4u": (1, 4), "psi_f4": (1, 2), "phi_f2u": (1, 4)}


def gray_image_code(C: RingCode, map_name: str) -> RingCode:
    """The image of ``C`` under one Gray map, as a code over the codomain ring."""
    gmap = MAPS[map_name]
    if C.ring is not gmap.domain:
        raise RingError(f"{map_name} expects {gmap.domain.value}, code is over {C.ring.value}")
    rows = np.concatenate([MUL[s][C.generator.data] for s in _MODULE_SCALARS[map_name]])
    G = RingMatrix(gmap.codomain, gmap.apply_array(rows))
    return RingCode(G, {"construction": "gray_image", "ring": gmap.codomain.value, "map": map_name, "base": C.ref()}, None)


# --------------------------------------------------------------------------
# extensions


def _check_c(c: RingElement, ring: Ring) -> None:
    if c.ring is not ring:
        raise ExtensionError("bad-c", f"c lies in {c.ring.value}, code is over {ring.value}")
    if not c.is_unit():
        raise ExtensionError("bad-c", "c is not a unit")
    if c not in units_square_one(ring):
        raise ExtensionError("bad-c", "c*c != 1")


def n_times_one(ring: Ring, n: int) -> RingElement:
    return RingElement(ring, n % 2)


def extend_A(C: RingCode, params: ExtensionParams, verify: bool = True) -> RingCode:
    """Length n+2 code from top row (1, 0, X) and rows (y_i, c y_i, r_i), y_i = <r_i, X>."""
    ring, n = C.ring, C.length
    X, c = params.X, params.c
    if X.ring is not ring:
        raise ExtensionError("bad-X", f"X lies in {X.ring.value}, code is over {ring.value}")
    if len(X) != n:
        raise ExtensionError("bad-X", f"X has length {len(X)}, expected {n}")
    _check_c(c, ring)
    xx = inner_product(X, X)
    if xx.bits != 1:
        raise ExtensionError("bad-X", f"<X,X> = {token(ring, xx.bits) if ring.contains(xx.bits) else xx.bits}, expected 1")
    if verify and not is_self_dual(C):
        raise ExtensionError("not-self-dual", "base code is not self-dual")
    G = C.generator.data
    y = matmul(G, X.data[:, None])[:, 0]
    top = np.concatenate([[1, 0], X.data]).astype(np.uint8)
    body = np.column_stack([y, MUL[c.bits][y], G])
    D = RingCode(
        RingMatrix(ring, np.vstack([top, body])),
        {"construction": "extension", "ring": ring.value, "theorem": "A", "base": C.ref(),
         "X": format_vector(X, compact=True), "c": token(ring, c.bits)},
    )
    if verify and not is_self_dual(D):
        raise ExtensionError("postcondition", "extended code is not self-dual")
    return D


def systematic_part(C: RingCode) -> np.ndarray | None:
    """A when the generator is [I_n | A], else None."""
    G = C.generator.data
    n = G.shape[0]
    if G.shape[1] != 2 * n or not np.array_equal(G[:, :n], np.eye(n, dtype=np.uint8)):
        return None
    return G[:, n:]


def extend_B(C: RingCode, params: ExtensionParams, verify: bool = True) -> RingCode:
    """Length 2n+2 code from top row (1, 0, X, 1..1) and rows (y_i, c y_i, e_i, A_i),
    where y_i = x_i + (sum of row i of A)."""
    ring = C.ring
    A = systematic_part(C)
    if A is None:
        raise ExtensionError("non-systematic", "generator is not of the form [I_n | A]")
    n = A.shape[0]
    X, c = params.X, params.c
    if X.ring is not ring:
        raise ExtensionError("bad-X", f"X lies in {X.ring.value}, code is over {ring.value}")
    if len(X) != n:
        raise ExtensionError("bad-X", f"X has length {len(X)}, expected {n}")
    _check_c(c, ring)
    xx = inner_product(X, X)
    want = 1 ^ n_times_one(ring, n).bits
    if xx.bits != want:
        raise ExtensionError("bad-X", f"<X,X> must equal 1 + n = {token(ring, want)}")
    if verify and not is_self_dual(C):
        raise ExtensionError("not-self-dual", "base code is not self-dual")
    r = np.bitwise_xor.reduce(A, axis=1)
    y = X.data ^ r
    top = np.concatenate([[1, 0], X.data, np.ones(n, dtype=np.uint8)]).astype(np.uint8)
    body = np.column_stack([y, MUL[c.bits][y], np.eye(n, dtype=np.uint8), A])
    D = RingCode(
        RingMatrix(ring, np.vstack([top, body])),
        {"construction": "extension", "ring": ring.value, "theorem": "B", "base": C.ref(),
         "X": format_vector(X, compact=True), "c": token(ring, c.bits)},
    )
    if verify and not is_self_dual(D):
        raise ExtensionError("postcondition", "extended code is not self-dual")
    return D


def extend(C: RingCode, params: ExtensionParams, verify: bool = True) -> RingCode:
    return (extend_A if params.theorem == "A" else extend_B)(C, params, verify)


def required_self_product(C: RingCode, theorem: str) -> int:
    """Payload that <X,X> must equal for the given extension theorem."""
    if theorem == "A":
        return 1
    return 1 ^ (C.generator.rows % 2)


def extension_length(C: RingCode, theorem: str) -> int:
    return C.length if theorem == "A" else C.generator.rows


def sample_extension_vector(ring: Ring, length: int, target: int, rng: np.random.Generator) -> RingVector:
    """Uniform random X repaired so that <X,X> = target.

    The first coordinate is shifted by d with d*d equal to the defect;
    (x + d)^2 = x^2 + d^2 in characteristic 2. Draws are repeated while the
    defect has no square root.
    """
    elements = np.array(ring.elements, dtype=np.uint8)
    roots = {}
    for d in ring.elements:
        roots.setdefault(int(MUL[d, d]), d)
    while True:
        x = rng.choice(elements, size=length)
        defect = int(np.bitwise_xor.reduce(MUL[x, x], initial=0)) ^ target
        if defect in roots:
            x[0] ^= roots[defect]
            return RingVector(ring, x)


__all__ = [
    "ExtensionError",
    "ExtensionParams",
    "RingCode",
    "check_four_circulant_condition",
    "enumerate_lifts",
    "extend",
    "extend_A",
    "extend_B",
    "four_circulant_code",
    "gray_image_code",
    "lift_code",
    "is_self_dual",
    "project_mu",
    "sample_extension_vector",
]
