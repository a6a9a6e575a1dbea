"""Code specification files and code JSON.

A spec file groups ``key = value`` lines under ``[code NAME]`` headers::

    [code C1]
    ring = F4
    construction = four_circulant
    rA = (1,w,w,0)
    rB = (w,W,W,w)

    [code E]
    construction = extension
    base = C1
    theorem = A
    X = ...
    c = 1

Constructions: ``four_circulant`` (rA, rB), ``matrix`` (rows separated by
``;``), ``lift`` (base, rA, rB), ``extension`` (base, theorem, X, c),
``gray_image`` (base, map) and ``projection`` (base). ``base`` names a code in
the same file or in the built-in library. ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .codes import (
    ExtensionParams,
    RingCode,
    extend,
    four_circulant_code,
    gray_image_code,
    lift_code,
    lift_ring,
    project_mu,
)
from .gray import MAPS
from .rings import Ring, RingError, RingMatrix, TokenError, format_vector, parse_element, parse_vector

SCHEMA_VERSION = 1

_REQUIRED = {
    "four_circulant": ("ring", "rA", "rB"),
    "matrix": ("ring", "rows"),
    "lift": ("base", "rA", "rB"),
    "extension": ("base", "theorem", "X", "c"),
    "gray_image": ("base", "map"),
    "projection": ("base",),
}
_OPTIONAL = {"ring", "name"}
_HEADER = re.compile(r"^\[\s*code\s+([A-Za-z0-9_.\-]+)\s*\]$")
_KEYVAL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


class SpecError(ValueError):
    """Parse or resolution failure, located by source, line and column."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None, col: int | None = None):
        self.source, self.line, self.col = source, line, col
        where = source or ("<spec>" if line is not None else "")
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class CodeSpec:
    name: str
    construction: str
    fields: dict[str, str]
    source: str = "<spec>"
    line: int = 0
    positions: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def ring(self) -> str | None:
        return self.fields.get("ring")

    def error(self, key: str | None, message: str, offset: int = 0) -> SpecError:
        line, col = self.positions.get(key, (self.line, 1)) if key else (self.line, 1)
        return SpecError(message, self.source, line, col + offset)


def parse_spec(text: str, source: str = "<spec>") -> list[CodeSpec]:
    specs: list[CodeSpec] = []
    current: dict | None = None

    def close():
        if current is None:
            return
        fields, pos = current["fields"], current["pos"]
        if "construction" not in fields:
            raise SpecError(f"code {current['name']} has no construction", source, current["line"])
        cons = fields.pop("construction")
        if cons not in _REQUIRED:
            line, col = pos["construction"]
            raise SpecError(f"unknown construction {cons!r}", source, line, col)
        missing = [k for k in _REQUIRED[cons] if k not in fields]
        if missing:
            raise SpecError(f"{cons} code {current['name']} lacks {', '.join(missing)}", source, current["line"])
        extra = set(fields) - set(_REQUIRED[cons]) - _OPTIONAL
        if extra:
            key = sorted(extra)[0]
            raise SpecError(f"unexpected key {key!r} for {cons}", source, *pos[key])
        specs.append(CodeSpec(current["name"], cons, fields, source, current["line"], pos))

    names = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip())
        body = stripped.strip()
        if body.startswith("["):
            m = _HEADER.match(body)
            if not m:
                raise SpecError("malformed section header, expected [code NAME]", source, lineno, indent + 1)
            close()
            name = m.group(1)
            if name in names:
                raise SpecError(f"duplicate code name {name!r}", source, lineno, indent + 1)
            names.add(name)
            current = {"name": name, "line": lineno, "fields": {}, "pos": {}}
            continue
        m = _KEYVAL.match(body)
        if not m:
            raise SpecError("expected key = value", source, lineno, indent + 1)
        if current is None:
            raise SpecError("key outside a [code NAME] section", source, lineno, indent + 1)
        key, value = m.group(1), m.group(2).strip()
        if key in current["fields"]:
            raise SpecError(f"duplicate key {key!r}", source, lineno, indent + 1)
        current["fields"][key] = value
        current["pos"][key] = (lineno, indent + 1 + m.start(2))
    close()
    return specs


class SpecBook:
    """Named specs with lazy, cached, cycle-checked resolution.

    Names are looked up in this book first, then in ``fallback``.
    """

    def __init__(self, specs: list[CodeSpec], fallback: "SpecBook | None" = None):
        self.specs = {s.name: s for s in specs}
        self.fallback = fallback
        self._built: dict[str, RingCode] = {}
        self._active: list[str] = []

    @classmethod
    def from_text(cls, text: str, source: str = "<spec>", fallback: "SpecBook | None" = None) -> "SpecBook":
        return cls(parse_spec(text, source), fallback)

    @classmethod
    def from_file(cls, path: str | Path, fallback: "SpecBook | None" = None) -> "SpecBook":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), str(path), fallback)

    def __contains__(self, name: str) -> bool:
        return name in self.specs or (self.fallback is not None and name in self.fallback)

    def names(self) -> list[str]:
        return list(self.specs)

    def build(self, name: str) -> RingCode:
        if name in self._built:
            return self._built[name]
        if name not in self.specs:
            if self.fallback is not None and name in self.fallback:
                return self.fallback.build(name)
            raise SpecError(f"unknown code {name!r}")
        if name in self._active:
            raise SpecError(f"cyclic base reference: {' -> '.join(self._active + [name])}")
        self._active.append(name)
        try:
            code = self._construct(self.specs[name])
        finally:
            self._active.pop()
        self._built[name] = code
        return code

    def _base(self, spec: CodeSpec) -> RingCode:
        base = spec.fields["base"]
        if base not in self:
            raise spec.error("base", f"unresolvable base {base!r}")
        return self.build(base)

    def _construct(self, spec: CodeSpec) -> RingCode:
        f = spec.fields
        base = self._base(spec) if "base" in f else None
        ring = _ring_of(spec, base)
        try:
            if spec.construction == "four_circulant":
                rA, rB = _vector(spec, "rA", ring), _vector(spec, "rB", ring)
                if len(rA) != len(rB):
                    raise spec.error("rB", "rA and rB must have equal length")
                code = four_circulant_code(rA, rB, spec.name)
            elif spec.construction == "matrix":
                rows = [r for r in f["rows"].split(";") if r.strip()]
                if not rows:
                    raise spec.error("rows", "matrix has no rows")
                vecs = [_vector(spec, "rows", ring, text=r, offset=_offset(f["rows"], r)) for r in rows]
                if len({len(v) for v in vecs}) != 1:
                    raise spec.error("rows", "matrix rows differ in length")
                code = RingCode(
                    RingMatrix.from_rows(vecs),
                    {"construction": "matrix", "ring": ring.value,
                     "rows": [format_vector(v) for v in vecs]},
                    spec.name,
                )
            elif spec.construction == "lift":
                rA, rB = _vector(spec, "rA", ring), _vector(spec, "rB", ring)
                code = lift_code(base, rA, rB, name=spec.name)
            elif spec.construction == "extension":
                theorem = f["theorem"].strip().upper()
                if theorem not in ("A", "B"):
                    raise spec.error("theorem", f"theorem must be A or B, got {f['theorem']!r}")
                X = _vector(spec, "X", ring)
                c = _element(spec, "c", ring)
                code = extend(base, ExtensionParams(theorem, X, c))
            elif spec.construction == "gray_image":
                if f["map"] not in MAPS:
                    raise spec.error("map", f"unknown Gray map {f['map']!r}")
                code = gray_image_code(base, f["map"])
            else:
                code = project_mu(base)
        except SpecError:
            raise
        except (RingError, ValueError) as exc:
            raise spec.error(None, str(exc)) from exc
        return RingCode(code.generator, code.provenance, spec.name)


def _ring_of(spec: CodeSpec, base: RingCode | None) -> Ring:
    declared = None
    if spec.ring is not None:
        try:
            declared = Ring.parse(spec.ring)
        except RingError as exc:
            raise spec.error("ring", str(exc)) from None
    if base is None:
        return declared
    expected = {
        "lift": lambda: lift_ring(base.ring),
        "gray_image": lambda: MAPS[spec.fields["map"]].codomain if spec.fields["map"] in MAPS else base.ring,
        "projection": lambda: base.ring.residue,
    }.get(spec.construction, lambda: base.ring)
    try:
        ring = expected()
    except RingError as exc:
        raise spec.error("base", str(exc)) from None
    if declared is not None and declared is not ring:
        raise spec.error("ring", f"declared ring {declared.value} but construction gives {ring.value}")
    return ring


def _offset(whole: str, part: str) -> int:
    return max(0, whole.find(part.strip()))


def _vector(spec: CodeSpec, key: str, ring: Ring, text: str | None = None, offset: int = 0):
    text = spec.fields[key] if text is None else text
    try:
        return parse_vector(text, ring)
    except TokenError as exc:
        return _raise_token(spec, key, text, exc, offset)
    except RingError as exc:
        raise spec.error(key, str(exc), offset) from None


def _element(spec: CodeSpec, key: str, ring: Ring):
    try:
        return parse_element(spec.fields[key].strip(), ring)
    except RingError as exc:
        raise spec.error(key, str(exc)) from None


def _raise_token(spec: CodeSpec, key: str, text: str, exc: TokenError, offset: int):
    col = text.find(exc.token) if exc.token else -1
    raise spec.error(key, f"invalid token {exc.token!r} for ring {exc.ring.value}", offset + max(col, 0)) from None


_LIBRARY: SpecBook | None = None


def library() -> SpecBook:
    """The built-in named codes (seeds, lifts and bases used by the tables)."""
    global _LIBRARY
    if _LIBRARY is None:
        text = resources.files("selfdual.data").joinpath("library.spec").read_text(encoding="utf-8")
        _LIBRARY = SpecBook.from_text(text, "library.spec")
    return _LIBRARY


def build_from_spec(spec: str | Path, name: str | None = None, use_library: bool = True) -> RingCode:
    """Build ``name`` (default: the last code) from spec text or a spec file path."""
    fallback = library() if use_library else None
    if isinstance(spec, Path) or (isinstance(spec, str) and "\n" not in spec and Path(spec).is_file()):
        book = SpecBook.from_file(spec, fallback)
    else:
        book = SpecBook.from_text(spec, fallback=fallback)
    if name is None:
        if not book.specs:
            raise SpecError("spec defines no codes")
        name = book.names()[-1]
    return book.build(name)


# --------------------------------------------------------------------------
# provenance round trip


def build_from_provenance(prov: dict) -> RingCode:
    """Rebuild a code from its self-contained provenance dictionary."""
    sections = _sections(prov, {})
    text = "\n".join(sections)
    book = SpecBook.from_text(text, "<provenance>")
    return book.build(book.names()[-1])


def spec_of(code: RingCode) -> str:
    """Spec text that rebuilds ``code`` without the library."""
    return "\n".join(_sections(code.ref(), {}))


def _sections(prov: dict, seen: dict[int, str]) -> list[str]:
    out: list[str] = []
    cons = prov.get("construction")
    if cons not in _REQUIRED:
        raise SpecError(f"provenance has unknown construction {cons!r}")
    fields = {k: v for k, v in prov.items() if k in _REQUIRED[cons] or k == "ring"}
    if "base" in fields:
        base = fields["base"]
        if isinstance(base, dict):
            out.extend(_sections(base, seen))
            fields["base"] = _last_name(out)
    if cons == "matrix":
        fields["rows"] = "; ".join(fields["rows"]) if isinstance(fields["rows"], list) else fields["rows"]
    name = prov.get("name") or f"code{len(seen)}"
    while name in seen.values():
        name = f"{name}_"
    seen[len(seen)] = name
    lines = [f"[code {name}]", f"construction = {cons}"]
    lines += [f"{k} = {v}" for k, v in fields.items()]
    out.append("\n".join(lines) + "\n")
    return out


def _last_name(sections: list[str]) -> str:
    return _HEADER.match(sections[-1].splitlines()[0]).group(1)


# --------------------------------------------------------------------------
# code JSON


def code_to_json(code: RingCode) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": code.name,
        "ring": code.ring.value,
        "length": code.length,
        "generator": [format_vector(v) for v in code.generator],
        "provenance": code.provenance,
    }


def code_from_json(doc: dict) -> RingCode:
    try:
        ring = Ring.parse(doc["ring"])
        rows = [parse_vector(r, ring) for r in doc["generator"]]
    except KeyError as exc:
        raise SpecError(f"code JSON lacks field {exc.args[0]!r}") from None
    except RingError as exc:
        raise SpecError(f"code JSON: {exc}") from None
    G = RingMatrix.from_rows(rows)
    return RingCode(G, dict(doc.get("provenance") or {}), doc.get("name"))


def write_code(code: RingCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code_to_json(code), indent=2) + "\n", encoding="utf-8")


def read_code(path: str | Path) -> RingCode:
    return code_from_json(json.loads(Path(path).read_text(encoding="utf-8")))
