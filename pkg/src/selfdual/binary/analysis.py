"""Weight enumeration and parameter extraction for binary codes."""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .code import BinaryCode, CodeError, pack_ints

log = logging.getLogger(__name__)

DEFAULT_SCAN_BOUND = 34
TABLE_BITS = 14


class ScanBoundError(CodeError):
    """Dimension too large for a full 2^k scan."""


class IncompleteCensusError(CodeError):
    """Census does not cover the weights an operation needs."""


def _fingerprint(code: BinaryCode) -> str:
    return hashlib.sha1(f"{code.n}:{code.rows}".encode()).hexdigest()


def scan_bound() -> int:
    return int(os.environ.get("SDF_SCAN_BOUND", DEFAULT_SCAN_BOUND))


@dataclass
class WeightCensus:
    n: int
    wmax: int
    counts: list[int]
    complete: bool
    method: str
    guaranteed_through: int
    words: np.ndarray | None = None
    collected_weight: int | None = None
    evaluations: int = 0

    def __getitem__(self, w: int) -> int:
        if w > self.guaranteed_through:
            raise IncompleteCensusError(f"weight {w} not covered (exact through {self.guaranteed_through})")
        return self.counts[w] if w <= self.wmax else 0

    def as_dict(self, nonzero: bool = True) -> dict[int, int]:
        top = min(self.wmax, self.guaranteed_through)
        return {w: c for w, c in enumerate(self.counts[: top + 1]) if c or not nonzero}

    def min_distance(self) -> int | None:
        for w in range(1, min(self.wmax, self.guaranteed_through) + 1):
            if self.counts[w]:
                return w
        return None


# --------------------------------------------------------------------------
# chunk runner


def _run_chunks(
    tasks: Sequence,
    run: Callable,
    jobs: int = 1,
    checkpoint: str | Path | None = None,
    fingerprint: str = "",
    encode: Callable = lambda r: r,
    decode: Callable = lambda r: r,
    progress: Callable[[int, int], None] | None = None,
) -> list:
    """Evaluate ``run(task)`` for each task; results come back in task order.

    With ``checkpoint`` set, finished results are persisted so an interrupted
    run resumes where it stopped.
    """
    results: dict[int, object] = {}
    ckpt = Path(checkpoint) if checkpoint else None
    if ckpt and ckpt.exists():
        saved = json.loads(ckpt.read_text())
        if saved.get("fingerprint") == fingerprint:
            results = {int(i): decode(v) for i, v in saved["results"].items()}
            log.info("resumed %d/%d chunks from %s", len(results), len(tasks), ckpt)
    todo = [i for i in range(len(tasks)) if i not in results]
    last_save = time.monotonic()

    def save():
        payload = {"fingerprint": fingerprint, "results": {str(i): encode(v) for i, v in results.items()}}
        tmp = ckpt.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload))
        tmp.replace(ckpt)

    def finished(i, value):
        nonlocal last_save
        results[i] = value
        if progress:
            progress(len(results), len(tasks))
        if ckpt and time.monotonic() - last_save > 30:
            save()
            last_save = time.monotonic()

    if jobs <= 1:
        for i in todo:
            finished(i, run(tasks[i]))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for i, value in zip(todo, pool.map(lambda i: run(tasks[i]), todo)):
                finished(i, value)
    if ckpt:
        save()
    return [results[i] for i in range(len(tasks))]


# --------------------------------------------------------------------------
# full scan


def _check_scan(code: BinaryCode, bound: int | None) -> None:
    bound = scan_bound() if bound is None else bound
    if code.k > bound:
        raise ScanBoundError(
            f"k={code.k} exceeds the full-scan bound {bound}; use low_weight_census instead"
        )


def weight_census_full(
    code: BinaryCode,
    jobs: int = 1,
    bound: int | None = None,
    checkpoint: str | Path | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> WeightCensus:
    """Complete weight distribution from a scan of all 2^k messages."""
    _check_scan(code, bound)
    rows = code.packed
    h = min(code.k, TABLE_BITS)
    table = kernels.gray_table(np.ascontiguousarray(rows[:h]))
    high = np.ascontiguousarray(rows[h:])
    total = 1 << (code.k - h)
    nbins = 64 * code.words_per_row + 1
    nchunks = min(total, max(1, 64 * jobs))
    edges = [total * i // nchunks for i in range(nchunks + 1)]
    tasks = [(edges[i], edges[i + 1]) for i in range(nchunks) if edges[i] < edges[i + 1]]
    hists = _run_chunks(
        tasks,
        lambda t: kernels.scan_chunk(table, high, t[0], t[1], nbins),
        jobs=jobs,
        checkpoint=checkpoint,
        fingerprint=f"scan:{_fingerprint(code)}",
        encode=lambda h_: h_.tolist(),
        decode=lambda v: np.array(v, dtype=np.int64),
        progress=progress,
    )
    hist = np.sum(hists, axis=0)[: code.n + 1]
    return WeightCensus(
        n=code.n,
        wmax=code.n,
        counts=[int(x) for x in hist],
        complete=True,
        method="scan",
        guaranteed_through=code.n,
        evaluations=1 << code.k,
    )


def min_distance_full(code: BinaryCode, jobs: int = 1, bound: int | None = None) -> int:
    census = weight_census_full(code, jobs=jobs, bound=bound)
    d = census.min_distance()
    if d is None:
        raise CodeError("zero code has no minimum distance")
    return d


# --------------------------------------------------------------------------
# low-weight census over information sets


def _coverage(t: int, k: int, fresh: Sequence[int]) -> float:
    """Weight below which every codeword is reached by messages of weight <= t."""
    if t >= k:
        return float("inf")
    return sum(max(0, t + 1 - (k - r)) for r in fresh)


def plan_census(code: BinaryCode, wmax: int, max_t: int | None = None) -> tuple[int, list[int], float]:
    """Choose the message weight t and the information sets to enumerate."""
    fresh = [r for _, _, r in code.information_sets]
    t = 0
    while _coverage(t, code.k, fresh) <= wmax:
        t += 1
    if max_t is not None and t > max_t:
        t = max_t
    used = [j for j, r in enumerate(fresh) if t + 1 - (code.k - r) > 0 or t >= code.k]
    if t >= code.k:
        used = [0]
    return t, used, _coverage(t, code.k, fresh)


def low_weight_census(
    code: BinaryCode,
    wmax: int,
    collect: int | None = None,
    max_t: int | None = None,
    jobs: int = 1,
    checkpoint: str | Path | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> WeightCensus:
    """Exact counts of codewords of weight <= ``wmax``.

    Messages of weight <= t are enumerated on a sequence of information
    sets. A codeword missed by every set has message weight > t on each, so
    it has weight > t - (k - fresh_j) on the columns first contributed by
    set j; these column groups are disjoint, so missed codewords are heavier
    than the summed bound. ``complete`` is set when that bound exceeds
    ``wmax``. Codewords of weight ``collect`` are also returned.
    """
    if wmax < 2:
        raise CodeError("wmax must be at least 2")
    t, used, cover = plan_census(code, wmax, max_t)
    k, W = code.k, code.words_per_row
    guaranteed = wmax if cover > wmax else max(0, int(cover) - 1)
    collect_w = -1 if collect is None else collect
    tasks = []
    for pos, j in enumerate(used):
        for weight in range(1, min(t, k) + 1):
            for first in range(0, k - weight + 1):
                tasks.append((pos, j, weight, first))
    set_rows = {j: pack_ints(code.information_sets[j][0], code.n) for j in used}
    set_masks = {j: pack_ints([sum(1 << p for p in code.information_sets[j][1])], code.n)[0] for j in used}

    def prev_masks(pos):
        if pos == 0:
            return np.zeros((0, W), dtype=np.uint64)
        return np.stack([set_masks[j] for j in used[:pos]])

    masks_by_pos = [prev_masks(p) for p in range(len(used))]

    def run(task):
        pos, j, weight, first = task
        cap = 1024
        while True:
            buf = np.zeros((cap if collect_w >= 0 else 0, W), dtype=np.uint64)
            hist, ncol = kernels.census_chunk(
                set_rows[j], masks_by_pos[pos], t, wmax, weight, first, collect_w, buf
            )
            if ncol <= buf.shape[0]:
                return hist, buf[:ncol]
            cap = ncol

    results = _run_chunks(
        tasks,
        run,
        jobs=jobs,
        checkpoint=checkpoint,
        fingerprint=f"census:{wmax}:{t}:{collect_w}:{_fingerprint(code)}",
        encode=lambda r: [r[0].tolist(), [[int(x) for x in row] for row in r[1]]],
        decode=lambda v: (np.array(v[0], dtype=np.int64), np.array(v[1], dtype=np.uint64).reshape(-1, W)),
        progress=progress,
    )
    hist = np.zeros(wmax + 1, dtype=np.int64)
    for h, _ in results:
        hist += h
    hist[0] = 1
    words = None
    if collect is not None:
        chunks = [w for _, w in results if len(w)]
        words = np.concatenate(chunks) if chunks else np.zeros((0, W), dtype=np.uint64)
    evaluations = len(used) * sum(comb(k, i) for i in range(1, min(t, k) + 1))
    return WeightCensus(
        n=code.n,
        wmax=wmax,
        counts=[int(x) for x in hist],
        complete=guaranteed >= wmax,
        method="census",
        guaranteed_through=guaranteed,
        words=words,
        collected_weight=collect,
        evaluations=evaluations,
    )


# --------------------------------------------------------------------------
# classification and parameters


class CodeType(enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    NOT_SELF_DUAL = "NotSelfDual"


def classify_type(code: BinaryCode) -> CodeType:
    """Type II iff self-dual with every basis row of weight divisible by 4."""
    if not code.is_self_dual():
        return CodeType.NOT_SELF_DUAL
    if all(r.bit_count() % 4 == 0 for r in code.rows):
        return CodeType.TYPE_II
    return CodeType.TYPE_I


def extremal_bound(n: int, code_type: CodeType | str) -> int:
    """Upper bound on the minimum distance of a self-dual code of length n."""
    code_type = CodeType(code_type) if isinstance(code_type, str) else code_type
    if n <= 0 or n % 2:
        raise CodeError(f"self-dual codes need positive even length, got {n}")
    if code_type is CodeType.NOT_SELF_DUAL:
        raise CodeError("no extremal bound for codes that are not self-dual")
    base = 4 * (n // 24)
    if code_type is CodeType.TYPE_I and n % 24 == 22:
        return base + 6
    return base + 4


@dataclass
class EnumeratorReport:
    family: str | None
    matched: bool
    beta: int | None = None
    gamma: int | None = None
    alpha: int | None = None
    coefficients: dict[int, int] = field(default_factory=dict)
    residuals: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"family": self.family, "matched": self.matched}
        for key in ("beta", "gamma", "alpha"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        out["coefficients"] = {str(w): c for w, c in self.coefficients.items()}
        if self.residuals:
            out["residuals"] = self.residuals
        return out


def _exact_div(num: int, den: int) -> int | None:
    return num // den if num % den == 0 else None


_NEEDS = {64: (12, 14), 68: (12, 14), 80: (16,), 88: (16,), 96: (16,)}


def extract_params(census: WeightCensus, n: int | None = None) -> EnumeratorReport:
    """Match the low-weight coefficients against the known enumerator families."""
    n = census.n if n is None else n
    if n not in _NEEDS:
        raise CodeError(f"no enumerator family known for length {n}")
    top = max(_NEEDS[n])
    if min(census.wmax, census.guaranteed_through) < top:
        raise IncompleteCensusError(f"length {n} needs exact counts through weight {top}")
    A = [census.counts[w] for w in range(top + 1)]
    coeffs = {w: A[w] for w in _NEEDS[n]}
    dmin = min(_NEEDS[n])
    low = {w: A[w] for w in range(1, dmin) if A[w]}
    report = EnumeratorReport(family=None, matched=False, coefficients=coeffs)
    if low:
        report.residuals["low_weight_words"] = low
        return report

    if n == 64:
        beta = _exact_div(A[12] - 1312, 16)
        if beta is None:
            report.residuals["A12"] = A[12]
            return report
        if A[14] == 0 and A[12] == 2976:
            # doubly-even: the extremal Type II enumerator is unique
            report.family, report.matched = "W64_II", True
            return report
        report.beta = beta
        if A[14] == 22016 - 64 * beta:
            report.family, report.matched = "W64_1", True
        elif A[14] == 23040 - 64 * beta:
            report.family, report.matched = "W64_2", True
        else:
            report.residuals["A14_vs_W64_1"] = A[14] - (22016 - 64 * beta)
            report.residuals["A14_vs_W64_2"] = A[14] - (23040 - 64 * beta)
    elif n == 68:
        beta = _exact_div(A[12] - 442, 4)
        if beta is None:
            report.residuals["A12"] = A[12]
            return report
        report.beta = beta
        if A[14] == 10864 - 8 * beta:
            report.family, report.matched = "W68_1", True
        else:
            gamma = _exact_div(14960 - 8 * beta - A[14], 256)
            if gamma is None:
                report.residuals["A14_vs_W68_2"] = (14960 - 8 * beta - A[14]) % 256
            else:
                report.family, report.matched, report.gamma = "W68_2", True, gamma
    elif n == 80:
        report.family = "W80"
        report.matched = A[16] == 97565
        if not report.matched:
            report.residuals["A16"] = A[16] - 97565
    elif n == 88:
        report.family, report.matched = "W88", True
    elif n == 96:
        report.family, report.matched = "W96", True
        report.alpha = A[16] + 28086
    return report


# --------------------------------------------------------------------------
# invariants over the words of one weight


def _words_of_weight(code: BinaryCode, w: int, census: WeightCensus | None, jobs: int) -> np.ndarray:
    if census is None or census.collected_weight != w or census.words is None:
        census = low_weight_census(code, max(w, 2), collect=w, jobs=jobs)
    if census.guaranteed_through < w:
        raise IncompleteCensusError(f"census is not complete at weight {w}")
    return census.words


def pair_invariant(
    code: BinaryCode, w: int, j: int, census: WeightCensus | None = None, jobs: int = 1
) -> int:
    """Number of unordered pairs of weight-w codewords at Hamming distance j."""
    words = np.ascontiguousarray(_words_of_weight(code, w, census, jobs))
    m = len(words)
    if m < 2:
        return 0
    nbins = 64 * code.words_per_row + 1
    # balance chunks by pair count (row a has m-1-a partners)
    nchunks = min(m, max(1, 32 * jobs))
    total = m * (m - 1) // 2
    edges = [0]
    acc = 0
    target = total / nchunks
    for a in range(m):
        acc += m - 1 - a
        if acc >= target * len(edges) and a + 1 < m:
            edges.append(a + 1)
    edges.append(m)
    tasks = [(lo, hi) for lo, hi in zip(edges, edges[1:]) if lo < hi]
    hists = _run_chunks(tasks, lambda t: kernels.pair_distance_counts(words, t[0], t[1], nbins), jobs=jobs)
    return int(np.sum(hists, axis=0)[j]) if j < nbins else 0


@dataclass
class DesignReport:
    weight: int
    t: int
    blocks: int
    is_design: bool
    lam: int | None
    lam_min: int
    lam_max: int


def design_lambda(
    code: BinaryCode, w: int, t: int, census: WeightCensus | None = None, jobs: int = 1
) -> DesignReport:
    """Check whether the supports of the weight-w codewords form a t-design."""
    words = np.ascontiguousarray(_words_of_weight(code, w, census, jobs))
    n = code.n
    binom = np.array([[comb(a, b) for b in range(t + 1)] for a in range(n + 1)], dtype=np.int64)
    counts = kernels.subset_cover_counts(words, n, t, binom)
    lo, hi = int(counts.min()), int(counts.max())
    return DesignReport(
        weight=w, t=t, blocks=len(words), is_design=lo == hi, lam=lo if lo == hi else None, lam_min=lo, lam_max=hi
    )
