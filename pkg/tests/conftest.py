from __future__ import annotations

import numpy as np
import pytest

from selfdual.codes import RingCode, four_circulant_code
from selfdual.rings import Ring, RingVector
from selfdual.search import _autocorrelation_ok
from selfdual.specfile import library

# one line per acceptance criterion, printed at the end of the session
CRITERIA: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(CRITERIA[key])


@pytest.fixture(scope="session")
def lib():
    return library()


_IMAGES: dict[str, object] = {}


@pytest.fixture(scope="session")
def image_of(lib):
    def get(name: str):
        if name not in _IMAGES:
            _IMAGES[name] = lib.build(name).binary_image()
        return _IMAGES[name]

    return get


def random_four_circulant_pairs(ring: Ring, n: int, count: int, seed: int) -> list[tuple[RingVector, RingVector]]:
    """Seed pairs satisfying the four-circulant self-duality condition, drawn at random."""
    rng = np.random.default_rng(seed)
    elements = np.array(ring.elements, dtype=np.uint8)
    found: list[tuple[RingVector, RingVector]] = []
    for _ in range(200):
        a = rng.choice(elements, size=(4096, n))
        b = rng.choice(elements, size=(4096, n))
        ok = np.flatnonzero(_autocorrelation_ok(a, b))
        for i in ok:
            found.append((RingVector(ring, a[i]), RingVector(ring, b[i])))
            if len(found) == count:
                return found
    return found


def small_self_dual_codes(ring: Ring, count: int, seed: int) -> list[RingCode]:
    codes = []
    for n in (2, 3, 4):
        for rA, rB in random_four_circulant_pairs(ring, n, count // 3 + 1, seed + n):
            codes.append(four_circulant_code(rA, rB))
    return codes[:count]
