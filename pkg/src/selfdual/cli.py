"""Command-line interface: build, analyze, extend, reproduce, search, classify.

Exit codes: 0 success, 1 a checked claim or construction precondition
failed, 2 usage or input error (including refusals that need --deep).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .binary import (
    BinaryCode,
    CodeError,
    CodeType,
    IncompleteCensusError,
    ScanBoundError,
    classify_type,
    design_lambda,
    extract_params,
    extremal_bound,
    low_weight_census,
    pair_invariant,
    scan_bound,
    weight_census_full,
)
from .binary.analysis import _NEEDS
from .codes import ExtensionError, ExtensionParams, RingCode, extend, is_self_dual
from .rings import RingError, parse_element, parse_vector
from .search import (
    DEEP_THRESHOLD_SECONDS,
    DeepRequired,
    classify_four_circulant_f4,
    extension_search,
    lift_search,
    projected_seconds,
    reproduce_table,
)
from .specfile import SpecBook, SpecError, code_from_json, code_to_json, library

SCHEMA_VERSION = 1
log = logging.getLogger("selfdual")


class UsageError(Exception):
    """Bad input reported with exit code 2."""


# --------------------------------------------------------------------------
# input helpers


def parse_count(text: str) -> int:
    """Integer that may be written as 10^5 or 1e5."""
    s = text.strip().replace("_", "")
    try:
        if "^" in s:
            base, exp = s.split("^", 1)
            return int(base) ** int(exp)
        if "e" in s.lower():
            value = float(s)
            if value != int(value):
                raise ValueError
            return int(value)
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from None


def load_code(ref: str, name: str | None = None) -> RingCode | BinaryCode:
    """Code JSON, spec file, '0'/'1' matrix file, or a built-in library name."""
    path = Path(ref)
    if not path.exists():
        if ref in library():
            return library().build(ref)
        raise UsageError(f"{ref}: no such file or library code")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{ref}: {exc.strerror}") from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return code_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{ref}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if "[code" in text:
        book = SpecBook.from_text(text, str(path), fallback=library())
        if not book.specs:
            raise UsageError(f"{ref}: spec defines no codes")
        return book.build(name or book.names()[-1])
    try:
        return BinaryCode.from_text(text)
    except CodeError as exc:
        raise UsageError(f"{ref}: {exc}") from None


def binary_of(code: RingCode | BinaryCode) -> BinaryCode:
    return code if isinstance(code, BinaryCode) else code.binary_image()


def emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def report(command: str, inputs: dict, results: list, anomalies: list | None = None,
           timing: dict | None = None, ok: bool = True) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "anomalies": anomalies or [],
        "timing": timing,
        "ok": ok,
    }


def _progress(label: str):
    if not log.isEnabledFor(logging.INFO):
        return None
    last = [0.0]

    def show(done: int, total: int) -> None:
        now = time.monotonic()
        if now - last[0] > 5 or done == total:
            last[0] = now
            log.info("%s: %d/%d", label, done, total)

    return show


# --------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    code = load_code(args.spec, args.name)
    if isinstance(code, BinaryCode):
        raise UsageError("build expects a spec file, not a binary matrix")
    emit(code_to_json(code), args.out)
    print(f"built {code.name or 'code'}: {code.ring.value}, {code.generator.rows}x{code.length}", file=sys.stderr)
    return 0


def _check_budget(what: str, seconds: float, deep: bool) -> None:
    if seconds > DEEP_THRESHOLD_SECONDS and not deep:
        raise DeepRequired(what, seconds)


def _min_distance(B: BinaryCode, args, results: list) -> int | None:
    if B.k <= scan_bound():
        _check_budget("full scan", projected_seconds(B), args.deep)
        census = weight_census_full(B, jobs=args.jobs)
        results.append({"check": "mindist", "method": "scan", "d": census.min_distance()})
        return census.min_distance()
    if not args.deep:
        raise DeepRequired(f"minimum distance with k={B.k} above the scan bound {scan_bound()}",
                           projected_seconds(B))
    # census with growing window until a codeword appears
    wmax = 4
    while True:
        census = low_weight_census(B, wmax, jobs=args.jobs)
        d = census.min_distance()
        if d is not None or wmax >= B.n:
            results.append({"check": "mindist", "method": "census", "d": d, "window": wmax})
            return d
        wmax = min(B.n, wmax + 4)


def cmd_analyze(args) -> int:
    code = load_code(args.code, args.name)
    B = binary_of(code)
    inputs = {"code": args.code, "n": B.n, "k": B.k}
    if isinstance(code, RingCode):
        inputs.update(ring=code.ring.value, name=code.name)
    results: list[dict] = []
    claims_ok = True
    t0 = time.monotonic()
    sd = B.is_self_dual()
    ctype = classify_type(B)

    if args.self_dual:
        val = sd if isinstance(code, BinaryCode) else is_self_dual(code)
        results.append({"check": "self_dual", "value": val, "pass": val})
        claims_ok &= val
    if args.type:
        results.append({"check": "type", "value": ctype.value})
    d = None
    if args.mindist:
        d = _min_distance(B, args, results)
    census = None
    wants_enum = args.params or any(v is not None for v in (args.expect_beta, args.expect_gamma, args.expect_alpha))
    wmax = args.census or 0
    if wants_enum:
        if B.n not in _NEEDS:
            raise UsageError(f"no enumerator family known for length {B.n}")
        wmax = max(wmax, max(_NEEDS[B.n]))
    inv = _parse_invariant(args.invariant) if args.invariant else None
    collect = None
    if inv:
        wmax = max(wmax, inv[0])
        collect = inv[0]
    if args.design:
        t, w = args.design
        wmax = max(wmax, w)
        collect = w if collect is None else collect
    if wmax:
        _check_budget(f"census through weight {wmax}", projected_seconds(B, wmax), args.deep)
        census = low_weight_census(B, wmax, collect=collect, jobs=args.jobs)
        if args.census:
            results.append({
                "check": "census",
                "wmax": census.wmax,
                "guaranteed_through": census.guaranteed_through,
                "complete": census.complete,
                "counts": {str(w): c for w, c in census.as_dict().items()},
            })
    if wants_enum:
        enum = extract_params(census)
        entry = {"check": "params", **enum.to_dict()}
        results.append(entry)
        for key, want in (("beta", args.expect_beta), ("gamma", args.expect_gamma), ("alpha", args.expect_alpha)):
            if want is not None:
                got = getattr(enum, key)
                ok = got == want
                results.append({"check": f"expect_{key}", "expected": want, "measured": got, "pass": ok})
                claims_ok &= ok
    if inv:
        w, j = inv
        words = census if census is not None and census.collected_weight == w else None
        value = pair_invariant(B, w, j, census=words, jobs=args.jobs)
        results.append({"check": "invariant", "name": args.invariant, "weight": w, "distance": j, "value": value})
    if args.design:
        t, w = args.design
        words = census if census is not None and census.collected_weight == w else None
        rep = design_lambda(B, w, t, census=words, jobs=args.jobs)
        results.append({"check": "design", "t": t, "weight": w, "blocks": rep.blocks,
                        "is_design": rep.is_design, "lambda": rep.lam,
                        "lambda_min": rep.lam_min, "lambda_max": rep.lam_max})
    if args.expect_d is not None:
        got = d if d is not None else (census.min_distance() if census is not None else _min_distance(B, args, results))
        ok = got == args.expect_d
        results.append({"check": "expect_d", "expected": args.expect_d, "measured": got, "pass": ok})
        claims_ok &= ok
    if args.expect_type is not None:
        ok = ctype.value == args.expect_type
        results.append({"check": "expect_type", "expected": args.expect_type, "measured": ctype.value, "pass": ok})
        claims_ok &= ok
    if args.extremal and sd:
        bound = extremal_bound(B.n, ctype)
        results.append({"check": "extremal_bound", "value": bound})

    timing = {"seconds": round(time.monotonic() - t0, 3)} if args.timing else None
    emit(report("analyze", inputs, results, timing=timing, ok=claims_ok), args.out)
    for r in results:
        print("  " + ", ".join(f"{k}={v}" for k, v in r.items() if k != "counts"), file=sys.stderr)
    print(f"analyze: [{B.n},{B.k}] {'ok' if claims_ok else 'CLAIM FAILED'} "
          f"({time.monotonic() - t0:.1f} s)", file=sys.stderr)
    return 0 if claims_ok else 1


def _parse_invariant(text: str) -> tuple[int, int]:
    """``I16`` -> pairs of weight-16 words at distance 16; ``I16@20`` -> weight 16, distance 20."""
    s = text.strip().upper()
    if not s.startswith("I"):
        raise UsageError(f"invariant must look like I16, got {text!r}")
    body = s[1:]
    try:
        if "@" in body:
            w, j = body.split("@", 1)
            return int(w), int(j)
        return int(body), int(body)
    except ValueError:
        raise UsageError(f"invariant must look like I16, got {text!r}") from None


def cmd_extend(args) -> int:
    code = load_code(args.code, args.name)
    if isinstance(code, BinaryCode):
        raise UsageError("extend needs a ring code (JSON, spec or library name), not a binary matrix")
    try:
        X = parse_vector(args.x, code.ring)
        c = parse_element(args.c.strip(), code.ring)
    except RingError as exc:
        raise UsageError(str(exc)) from None
    out = extend(code, ExtensionParams(args.theorem, X, c))
    if args.new_name:
        out = RingCode(out.generator, out.provenance, args.new_name)
    emit(code_to_json(out), args.out)
    print(f"extended by theorem {args.theorem}: {out.ring.value}, {out.generator.rows}x{out.length}", file=sys.stderr)
    return 0


def cmd_reproduce(args) -> int:
    t0 = time.monotonic()
    labels = args.rows.split(",") if args.rows else None
    rep = reproduce_table(args.table, method=args.method, deep=args.deep, jobs=args.jobs,
                          labels=labels, progress=_progress(f"table {args.table}"))
    inputs = {"table": rep["table"], "slug": rep["slug"], "method": args.method, "deep": args.deep}
    if labels:
        inputs["rows"] = labels
    timing = {"seconds": round(time.monotonic() - t0, 3)} if args.timing else None
    anomalies = rep["anomalies"] + [{"kind": "note", "text": n} for n in rep["notes"]]
    emit(report("reproduce", inputs, rep["rows"], anomalies, timing, rep["ok"]), args.out)
    print(f"table {rep['table']} ({rep['slug']}): " + ", ".join(f"{k} {v}" for k, v in rep["summary"].items() if v)
          + f" ({time.monotonic() - t0:.1f} s)", file=sys.stderr)
    for row in rep["rows"]:
        if row["status"] != "pass":
            detail = "; ".join(row.get("mismatches") or []) or row.get("error", "")
            print(f"  {row['label']}: {row['status']} {detail}", file=sys.stderr)
    return 0 if rep["ok"] else 1


def cmd_search(args) -> int:
    base = load_code(args.base, args.name)
    if isinstance(base, BinaryCode):
        raise UsageError("search needs a ring code as base")
    t0 = time.monotonic()
    if args.mode == "lifts":
        if args.target_d is None:
            raise UsageError("--mode lifts needs --target-d")
        rep = lift_search(base, args.target_d, mode=args.lift_mode, budget=args.budget, seed=args.seed,
                          jobs=args.jobs, progress=_progress("lifts"))
    else:
        c_set = None
        if args.c:
            try:
                c_set = [parse_element(t.strip(), base.ring) for t in args.c.split(",")]
            except RingError as exc:
                raise UsageError(str(exc)) from None
        rep = extension_search(base, args.theorem, c_set=c_set, seed=args.seed, budget=args.budget,
                               target_d=args.target_d, jobs=args.jobs, progress=_progress("extensions"))
    doc = rep.to_dict()
    inputs = {"mode": args.mode, "base": args.base, "seed": args.seed, "budget": args.budget,
              "target_d": args.target_d}
    if args.mode == "lifts":
        inputs["lift_mode"] = args.lift_mode
    else:
        inputs["theorem"] = args.theorem
    timing = {"seconds": round(time.monotonic() - t0, 3)} if args.timing else None
    anomalies = [{"kind": "note", "text": n} for n in doc["notes"]]
    emit(report("search", inputs, [doc], anomalies, timing), args.out)
    print(f"search {args.mode}: {doc['candidates_examined']} candidates, {len(doc['hits'])} hits "
          f"({time.monotonic() - t0:.1f} s)", file=sys.stderr)
    for note in doc["notes"]:
        print(f"  note: {note}", file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    t0 = time.monotonic()
    codes = classify_four_circulant_f4(args.n, args.min_d, jobs=args.jobs, progress=_progress("classify"))
    results = [{"rA": c.provenance["rA"], "rB": c.provenance["rB"]} for c in codes]
    timing = {"seconds": round(time.monotonic() - t0, 3)} if args.timing else None
    emit(report("classify", {"n": args.n, "min_d": args.min_d}, results, timing=timing), args.out)
    print(f"classify: {len(codes)} seed pairs ({time.monotonic() - t0:.1f} s)", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# parser


def _positive(text: str) -> int:
    v = parse_count(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selfdual", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, jobs=True):
        sp.add_argument("-o", "--out", help="write JSON here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include wall-clock timing in the JSON")
        if jobs:
            sp.add_argument("--jobs", type=_positive, default=1, help="worker threads")

    sp = sub.add_parser("build", help="build a code from a spec file")
    sp.add_argument("spec")
    sp.add_argument("--name", help="code to build (default: last in file)")
    sp.add_argument("-o", "--out")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("analyze", help="analyze a code")
    sp.add_argument("code", help="code JSON, spec file, 0/1 matrix file or library name")
    sp.add_argument("--name")
    sp.add_argument("--self-dual", action="store_true")
    sp.add_argument("--type", action="store_true")
    sp.add_argument("--mindist", action="store_true")
    sp.add_argument("--census", type=int, metavar="WMAX")
    sp.add_argument("--params", action="store_true", help="match the weight enumerator family")
    sp.add_argument("--invariant", metavar="I16")
    sp.add_argument("--design", type=int, nargs=2, metavar=("T", "W"))
    sp.add_argument("--extremal", action="store_true", help="report the extremal bound")
    sp.add_argument("--expect-beta", type=int)
    sp.add_argument("--expect-gamma", type=int)
    sp.add_argument("--expect-alpha", type=int)
    sp.add_argument("--expect-d", type=int)
    sp.add_argument("--expect-type", choices=[t.value for t in CodeType])
    sp.add_argument("--deep", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("extend", help="apply an extension theorem")
    sp.add_argument("code")
    sp.add_argument("--name")
    sp.add_argument("--theorem", choices=["A", "B"], required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--c", required=True)
    sp.add_argument("--new-name")
    sp.add_argument("-o", "--out")
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("reproduce", help="verify a bundled table")
    sp.add_argument("--table", required=True, help="1..12 or a slug such as extB")
    sp.add_argument("--rows", help="comma-separated row labels")
    sp.add_argument("--method", choices=["census", "scan"], default="census")
    sp.add_argument("--deep", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("search", help="seeded lift or extension search")
    sp.add_argument("--mode", choices=["lifts", "extensions"], required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--name")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--budget", type=_positive, default=100)
    sp.add_argument("--target-d", type=int)
    sp.add_argument("--lift-mode", choices=["random", "exhaustive"], default="random")
    sp.add_argument("--theorem", choices=["A", "B"], default="A")
    sp.add_argument("--c", help="comma-separated unit tokens for c")
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("classify", help="exhaustive four-circulant classification over F4")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--min-d", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_classify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except DeepRequired as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (UsageError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExtensionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 1
    except (IncompleteCensusError, ScanBoundError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (RingError, CodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
