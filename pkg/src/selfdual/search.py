"""Search and reproduction drivers: classification, lift and extension searches,
and row-by-row verification of the bundled tables."""

from __future__ import annotations

import logging
import time
from math import comb
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .binary import (
    BinaryCode,
    EnumeratorReport,
    classify_type,
    extract_params,
    extremal_bound,
    low_weight_census,
    pair_invariant,
    plan_census,
    scan_bound,
    weight_census_full,
)
from .binary.analysis import _NEEDS
from .codes import (
    ExtensionError,
    ExtensionParams,
    RingCode,
    enumerate_lifts,
    extend,
    extension_length,
    four_circulant_code,
    is_self_dual,
    lift_code,
    required_self_product,
    sample_extension_vector,
    units_square_one,
)
from .rings import MUL, Ring, RingElement, RingError, RingVector
from .specfile import SpecError, build_from_spec
from .tables import NOTES, TableRow, load_table

log = logging.getLogger(__name__)

# rough per-item costs on one core, used only for run-time projections
SCAN_SECONDS_PER_WORD = 1.6e-9
CENSUS_SECONDS_PER_EVAL = 3.5e-8
DEEP_THRESHOLD_SECONDS = 300.0


class DeepRequired(RuntimeError):
    """A verification is projected to run longer than the threshold without ``deep``."""

    def __init__(self, what: str, seconds: float, always: bool = False):
        self.what, self.seconds = what, seconds
        why = "is a deep check" if always else "exceeds the interactive budget"
        super().__init__(f"{what} {why} (projected {seconds:.0f} s single-threaded); rerun with --deep")


def projected_seconds(code: BinaryCode, wmax: int | None = None) -> float:
    """Projected single-threaded time for a full scan (``wmax`` None) or a census."""
    if wmax is None:
        return (2.0**code.k) * SCAN_SECONDS_PER_WORD * max(1, code.words_per_row - 1)
    t, used, _ = plan_census(code, wmax)
    evals = len(used) * sum(comb(code.k, i) for i in range(1, min(t, code.k) + 1))
    return evals * CENSUS_SECONDS_PER_EVAL


# --------------------------------------------------------------------------
# shared analysis helpers


def census_for(code: BinaryCode, wmax: int, method: str = "census", collect: int | None = None, jobs: int = 1):
    """Exact counts through ``wmax``, by information-set census or by a full scan."""
    if method == "scan":
        return weight_census_full(code, jobs=jobs)
    if method != "census":
        raise ValueError(f"unknown method {method!r}")
    return low_weight_census(code, wmax, collect=collect, jobs=jobs)


def quick_reject(code: BinaryCode, target_d: int) -> int | None:
    """Weight of a codeword lighter than ``target_d`` found cheaply, else None.

    Only messages of weight <= 2 on the information sets are tried, so a
    None answer proves nothing; a returned weight is a real codeword.
    """
    if target_d <= 1:
        return None
    census = low_weight_census(code, max(2, target_d - 1), max_t=2)
    for w in range(1, target_d):
        if w < len(census.counts) and census.counts[w]:
            return w
    return None


def _needs(n: int, target: int) -> int:
    return max((target,) + _NEEDS.get(n, ()))


# --------------------------------------------------------------------------
# classification over F4


def _autocorrelation_ok(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized A A^T + B B^T = I for batches of circulant first rows."""
    n = a.shape[1]
    ok = np.ones(a.shape[0], dtype=bool)
    for k in range(n // 2 + 1):
        s = np.zeros(a.shape[0], dtype=np.uint8)
        for i in range(n):
            j = (i + k) % n
            s ^= MUL[a[:, i], a[:, j]] ^ MUL[b[:, i], b[:, j]]
        ok &= s == (1 if k == 0 else 0)
    return ok


def classify_four_circulant_f4(
    n: int, min_image_d: int, jobs: int = 1, progress: Callable[[int, int], None] | None = None
) -> list[RingCode]:
    """All seed pairs over F4 of block size n meeting the self-duality condition and
    with psi-image minimum distance at least ``min_image_d``.

    Candidates are ordered by (rA, rB) with the first symbol most significant;
    no reduction by equivalence is made.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"block size {n} out of range 1..6 for exhaustive classification")
    total = 4 ** (2 * n)
    digits = np.arange(2 * n)[::-1] * 2
    out: list[RingCode] = []
    step = 1 << 16
    for lo in range(0, total, step):
        idx = np.arange(lo, min(total, lo + step), dtype=np.int64)
        sym = ((idx[:, None] >> digits[None, :]) & 3).astype(np.uint8)
        ok = _autocorrelation_ok(sym[:, :n], sym[:, n:])
        for row in sym[ok]:
            code = four_circulant_code(RingVector(Ring.F4, row[:n]), RingVector(Ring.F4, row[n:]))
            image = code.binary_image()
            if min_image_d > 1 and quick_reject(image, min_image_d) is not None:
                continue
            d = census_for(image, image.n, "scan" if image.k <= scan_bound() else "census", jobs=jobs).min_distance()
            if d is not None and d >= min_image_d:
                out.append(code)
        if progress:
            progress(min(total, lo + step), total)
    return out


# --------------------------------------------------------------------------
# search reports


@dataclass
class SearchHit:
    index: int
    provenance: dict
    d: int
    code_type: str
    enumerator: EnumeratorReport | None

    def to_dict(self) -> dict:
        out = {"index": self.index, "d": self.d, "type": self.code_type, "provenance": self.provenance}
        if self.enumerator is not None:
            out["enumerator"] = self.enumerator.to_dict()
        return out


@dataclass
class SearchReport:
    mode: str
    candidates_examined: int = 0
    hits: list[SearchHit] = field(default_factory=list)
    seed: int | None = None
    filters_applied: list[str] = field(default_factory=list)
    skipped: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def skip(self, reason: str) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "candidates_examined": self.candidates_examined,
            "filters_applied": list(self.filters_applied),
            "skipped": dict(sorted(self.skipped.items())),
            "hits": [h.to_dict() for h in sorted(self.hits, key=lambda h: h.index)],
            "notes": list(self.notes),
        }


def _evaluate(code: RingCode, target_d: int, report: SearchReport, index: int, jobs: int) -> None:
    image = code.binary_image()
    if 2 * image.k != image.n or not is_self_dual(code):
        report.skip("not self-dual")
        return
    if quick_reject(image, target_d) is not None:
        report.skip("low-weight word found by quick check")
        return
    census = low_weight_census(image, _needs(image.n, target_d), jobs=jobs)
    d = census.min_distance()
    if d != target_d:
        report.skip("minimum distance differs from target")
        return
    enum = extract_params(census) if image.n in _NEEDS else None
    report.hits.append(SearchHit(index, code.ref(), d, classify_type(image).value, enum))


# --------------------------------------------------------------------------
# lift search


def lift_search(
    seed_code: RingCode,
    target_d: int,
    mode: str = "random",
    budget: int = 1000,
    seed: int | None = None,
    candidates: Sequence[tuple[RingVector, RingVector]] | None = None,
    jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> SearchReport:
    """Four-circulant lifts of ``seed_code`` whose binary images reach ``target_d``.

    ``mode`` is ``exhaustive`` (the first ``budget`` lifts in index order),
    ``random`` (``budget`` draws from ``seed``) or ``directed`` (the given
    ``candidates``).
    """
    report = SearchReport(mode=f"lifts/{mode}", seed=seed)
    if not is_self_dual(seed_code):
        raise ExtensionError("not-self-dual", "seed code is not self-dual")
    image = seed_code.binary_image()
    d_seed = census_for(image, image.n, "scan" if image.k <= scan_bound() else "census", jobs=jobs).min_distance()
    report.filters_applied.append("projection bound: d(lift image) <= 2 d(seed image)")
    if 2 * d_seed < target_d:
        report.notes.append(
            f"infeasible target: projection bound gives d <= 2*{d_seed} = {2 * d_seed} < {target_d}"
        )
        return report
    report.filters_applied += ["four-circulant condition", "quick low-weight check", "exact census"]
    if mode == "directed":
        if candidates is None:
            raise ValueError("directed mode needs candidates")
        stream: Iterable = (
            (i, lift_code(seed_code, rA, rB, index=i)) for i, (rA, rB) in enumerate(candidates)
        )
        total = len(candidates)
    elif mode in ("exhaustive", "random"):
        if mode == "random" and seed is None:
            raise ValueError("random mode needs an explicit seed")
        it = enumerate_lifts(seed_code, mode=mode, seed=seed, budget=budget, stop=budget if mode == "exhaustive" else None)
        stream = ((c.provenance["lift_index"], c) for c in it)
        total = budget
    else:
        raise ValueError(f"unknown lift mode {mode!r}")
    for count, (i, code) in enumerate(stream, 1):
        report.candidates_examined += 1
        if not (code.generator @ code.generator.T).data.any():
            _evaluate(code, target_d, report, i, jobs)
        else:
            report.skip("four-circulant condition fails")
        if progress:
            progress(count, total)
    return report


# --------------------------------------------------------------------------
# extension search


def extension_search(
    base: RingCode,
    theorem: str,
    c_set: Sequence[RingElement] | None = None,
    seed: int | None = None,
    budget: int = 100,
    target_d: int | None = None,
    jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> SearchReport:
    """Random extension vectors (repaired to the required self-product) and
    their extensions; hits reach the extremal bound for the new length."""
    if seed is None:
        raise ValueError("extension search needs an explicit seed")
    if not is_self_dual(base):
        raise ExtensionError("not-self-dual", "base code is not self-dual")
    ring = base.ring
    units = sorted(units_square_one(ring), key=lambda e: e.bits)
    c_set = list(c_set) if c_set else units
    report = SearchReport(mode=f"extensions/{theorem}", seed=seed)
    report.filters_applied += ["extremal target", "quick low-weight check", "exact census"]
    rng = np.random.default_rng(seed)
    want = required_self_product(base, theorem)
    length = extension_length(base, theorem)
    for i in range(budget):
        X = sample_extension_vector(ring, length, want, rng)
        c = c_set[int(rng.integers(len(c_set)))]
        report.candidates_examined += 1
        try:
            code = extend(base, ExtensionParams(theorem, X, c), verify=False)
        except ExtensionError as exc:
            report.skip(exc.kind)
            continue
        image = code.binary_image()
        target = target_d if target_d is not None else extremal_bound(image.n, classify_type(image))
        _evaluate(code, target, report, i, jobs)
        if progress:
            progress(i + 1, budget)
    return report


# --------------------------------------------------------------------------
# table reproduction


def _check(expect: dict, measured: dict) -> list[str]:
    bad = []
    for key, want in expect.items():
        got = measured.get(key)
        if got != want:
            bad.append(f"{key}: expected {want}, measured {got}")
    return bad


def verify_row(row: TableRow, method: str = "census", jobs: int = 1) -> dict:
    """Rebuild one table row and measure every expected parameter."""
    out = {"index": row.index, "label": row.label, "flags": list(row.flags), "expected": row.expect}
    try:
        code = build_from_spec(row.spec)
    except (SpecError, RingError, ExtensionError) as exc:
        out.update(status="flagged" if row.flagged else "error", error=str(exc))
        return out
    image = code.binary_image()
    exp = row.expect
    m: dict = {"n": image.n, "k": image.k, "self_dual": image.is_self_dual()}
    ctype = classify_type(image)
    if "type" in exp:
        m["type"] = ctype.value
    n = image.n
    if "A8" in exp:
        words = low_weight_census(image, 8, collect=8, jobs=jobs)
        counts = weight_census_full(image, jobs=jobs) if method == "scan" else words
        m["d"] = counts.min_distance()
        m["A8"] = counts[8]
        m["I8"] = pair_invariant(image, 8, 8, census=words, jobs=jobs)
    elif n in _NEEDS:
        collect = 16 if "I16" in exp else None
        if method == "scan":
            counts = weight_census_full(image, jobs=jobs)
        else:
            counts = low_weight_census(image, _needs(n, exp.get("d", 0)), collect=collect, jobs=jobs)
        m["d"] = counts.min_distance()
        enum = extract_params(counts)
        if "family" in exp:
            m["family"] = enum.family
        for key in ("beta", "gamma", "alpha"):
            if key in exp:
                m[key] = getattr(enum, key)
        if "A16" in exp:
            m["A16"] = counts[16]
        if "I16" in exp:
            m["I16"] = pair_invariant(image, 16, 16, census=counts if collect else None, jobs=jobs)
    else:
        census = census_for(image, n, "scan" if image.k <= scan_bound() else "census", jobs=jobs)
        m["d"] = census.min_distance()
    out["measured"] = m
    mismatches = _check(exp, m)
    out["mismatches"] = mismatches
    out["status"] = "pass" if not mismatches else "fail"
    return out


def _duplicates(rows: Sequence[TableRow]) -> list[dict]:
    seen: dict[str, str] = {}
    out = []
    for row in rows:
        body = "\n".join(row.spec.splitlines()[1:])
        if body in seen:
            out.append({"kind": "duplicate-row", "row": row.label, "same_as": seen[body]})
        else:
            seen[body] = row.label
    return out


def reproduce_table(
    table: int | str,
    method: str = "census",
    deep: bool = False,
    jobs: int = 1,
    labels: Sequence[str] | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> dict:
    """Rebuild and check every row of a bundled table.

    Rows run in table order; ``labels`` restricts the run to a subset.
    Returns a JSON-ready report whose ``ok`` field is true iff every
    non-flagged row passes.
    """
    T = load_table(table)
    rows = [r for r in T.rows if labels is None or r.label in labels]
    if labels is not None:
        missing = sorted(set(labels) - {r.label for r in rows})
        if missing:
            raise SpecError(f"table {T.table_id} has no rows {', '.join(missing)}")
    if T.deep and not deep:
        estimate = 0.0
        for r in rows:
            try:
                estimate += projected_seconds(build_from_spec(r.spec).binary_image(), 16)
            except (SpecError, RingError, ExtensionError):
                pass
        raise DeepRequired(f"table {T.table_id} ({T.slug})", estimate, always=True)
    results = []
    for i, row in enumerate(rows):
        t0 = time.monotonic()
        results.append(verify_row(row, method=method, jobs=jobs))
        log.info("table %d row %s: %s (%.1f s)", T.table_id, row.label, results[-1]["status"], time.monotonic() - t0)
        if progress:
            progress(i + 1, len(rows))
    anomalies = []
    for r in results:
        if r["flags"]:
            anomalies.append({"kind": "flagged-row", "row": r["label"], "flags": r["flags"], "status": r["status"]})
    anomalies += _duplicates(rows)
    notes = []
    if T.table_id in NOTES:
        notes.append(NOTES[T.table_id])
    if 3 <= T.table_id <= 9:
        notes.append(NOTES["count"])
    counts = {s: sum(1 for r in results if r["status"] == s) for s in ("pass", "fail", "flagged", "error")}
    ok = all(r["status"] == "pass" for r in results if not r["flags"])
    return {
        "table": T.table_id,
        "slug": T.slug,
        "title": T.title,
        "method": method,
        "rows": results,
        "summary": counts,
        "anomalies": anomalies,
        "notes": notes,
        "ok": ok,
    }
