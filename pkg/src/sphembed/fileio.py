"""Scheme text format, report formatting, run manifests and the batch runner.

Scheme files::

    # optional comments anywhere after '#'
    n d
    r_11 r_12 ... r_1n
    ...
    r_n1 r_n2 ... r_nn

Parsing checks only local well-formedness; the scheme axioms are left to
:func:`sphembed.scheme.validate_scheme`.
"""

from __future__ import annotations

import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import ClassificationResult, ClassifierError, classify_m1_3
from .scheme import RelationMatrix, SchemeError
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "ParseError",
    "BadHeader",
    "RaggedRow",
    "EntryOutOfRange",
    "SymmetryViolation",
    "parse_scheme_file",
    "read_scheme",
    "serialize_scheme",
    "format_embedding",
    "format_spectra",
    "RunResult",
    "RunManifest",
    "load_manifest",
    "run_pipeline",
    "tolerances_from_options",
]

_TOKEN = re.compile(r"\S+")


class ParseError(ValueError):
    def __init__(self, message, line, column=None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


class BadHeader(ParseError):
    pass


class RaggedRow(ParseError):
    pass


class EntryOutOfRange(ParseError):
    pass


class SymmetryViolation(ParseError):
    pass


def _content_lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if tokens:
            yield number, tokens


def parse_scheme_file(text: str) -> RelationMatrix:
    lines = _content_lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise BadHeader("missing 'n d' header", 1) from None
    if len(header) != 2:
        raise BadHeader(f"expected 'n d', got {len(header)} fields", number)
    try:
        n, d = (int(tok) for tok, _ in header)
    except ValueError:
        raise BadHeader("header fields must be integers", number) from None
    if n < 1 or d < 0:
        raise BadHeader(f"need n >= 1 and d >= 0, got n={n} d={d}", number)

    entries = np.empty((n, n), dtype=np.int64)
    where = {}
    last = number
    for row in range(n):
        try:
            number, tokens = next(lines)
        except StopIteration:
            raise RaggedRow(f"expected {n} rows, found {row}", last + 1) from None
        last = number
        if len(tokens) != n:
            raise RaggedRow(f"row {row + 1} has {len(tokens)} entries, expected {n}", number)
        for col, (tok, column) in enumerate(tokens):
            try:
                value = int(tok)
            except ValueError:
                raise EntryOutOfRange(f"entry {tok!r} is not an integer", number, column) from None
            if not 0 <= value <= d:
                raise EntryOutOfRange(f"entry {value} outside [0, {d}]", number, column)
            entries[row, col] = value
        where[row] = (number, [c for _, c in tokens])
    extra = next(lines, None)
    if extra is not None:
        raise RaggedRow(f"unexpected content after {n} rows", extra[0])

    bad = np.argwhere(entries != entries.T)
    if len(bad):
        x, y = max(map(tuple, bad))  # report the later of the two entries
        line, cols = where[x]
        raise SymmetryViolation(
            f"entry ({x + 1}, {y + 1}) = {entries[x, y]} but ({y + 1}, {x + 1}) = {entries[y, x]}",
            line,
            cols[y],
        )
    return RelationMatrix(entries, d=d)


def read_scheme(path) -> RelationMatrix:
    return parse_scheme_file(Path(path).read_text())


def serialize_scheme(M: RelationMatrix, comment: str | None = None, coordinates=None) -> str:
    """Scheme text; ``coordinates`` are appended as a ``#``-commented block."""
    out = []
    if comment:
        out += [f"# {line}" for line in comment.splitlines()]
    out.append(f"{M.n} {M.d}")
    width = len(str(M.d))
    out += [" ".join(f"{v:>{width}d}" for v in row) for row in M.entries]
    if coordinates is not None:
        coordinates = np.asarray(coordinates)
        out.append(f"# coordinates {coordinates.shape[0]} {coordinates.shape[1]}")
        out += ["# " + " ".join(f"{x:.12g}" for x in row) for row in coordinates]
    return "\n".join(out) + "\n"


def _g(x):
    x = float(x)
    return 0.0 if abs(x) < 1e-14 else x


def format_embedding(emb, gram: bool = False) -> str:
    out = [f"{emb.n} {emb.m} {_g(emb.alpha):.12g}"]
    out += [" ".join(f"{_g(x):.12g}" for x in row) for row in emb.points]
    if gram:
        out.append("# gram")
        out += [" ".join(f"{_g(x):.12g}" for x in row) for row in emb.gram]
    return "\n".join(out) + "\n"


def _sig(values):
    return [[float(f"{_g(x):.12g}") for x in row] for row in np.asarray(values)]


def format_spectra(S, q_polynomial=None) -> str:
    """JSON text with one matrix row per line."""
    fields = [
        ("n", json.dumps(S.n)),
        ("d", json.dumps(S.d)),
        ("multiplicities", json.dumps(list(S.m))),
        ("valencies", json.dumps(list(S.k))),
    ]
    for name, mat in (("P", S.P), ("Q", S.Q)):
        rows = ",\n".join("    " + json.dumps(row) for row in _sig(mat))
        fields.append((name, "[\n" + rows + "\n  ]"))
    if q_polynomial is not None:
        fields.append(("q_polynomial_candidates", json.dumps(list(q_polynomial))))
    body = ",\n".join(f'  "{k}": {v}' for k, v in fields)
    return "{\n" + body + "\n}"


# ---------------------------------------------------------------------------
# manifests

@dataclass
class RunResult:
    id: str
    result: ClassificationResult | None
    error: str | None
    elapsed_ms: float

    def to_dict(self):
        return {
            "id": self.id,
            "result": None if self.result is None else self.result.to_dict(),
            "error": self.error,
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, data):
        result = data.get("result")
        return cls(
            id=data["id"],
            result=None if result is None else ClassificationResult.from_dict(result),
            error=data.get("error"),
            elapsed_ms=data["elapsed_ms"],
        )

    def to_line(self):
        if self.result is not None:
            return self.result.to_line(self.id)
        return f"{self.id} ERROR:{self.error}"


@dataclass
class RunManifest:
    inputs: list  # [(id, path)]
    options: dict = field(default_factory=dict)
    results: list = field(default_factory=list)

    def to_dict(self):
        return {
            "inputs": [{"id": i, "path": str(p)} for i, p in self.inputs],
            "options": dict(self.options),
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data):
        return cls(
            inputs=[(item["id"], item["path"]) for item in data.get("inputs", [])],
            options=dict(data.get("options", {})),
            results=[RunResult.from_dict(r) for r in data.get("results", [])],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def load_manifest(path) -> RunManifest:
    """JSON manifest, or plain lines of ``id path``; paths resolve against the manifest."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        manifest = RunManifest.from_json(text)
    else:
        inputs = []
        for number, tokens in _content_lines(text):
            if len(tokens) != 2:
                raise ParseError("expected 'id path'", number)
            inputs.append((tokens[0][0], tokens[1][0]))
        manifest = RunManifest(inputs=inputs)
    base = path.parent
    manifest.inputs = [(i, str(p if os.path.isabs(p) else base / p)) for i, p in manifest.inputs]
    return manifest


def tolerances_from_options(options) -> Tolerances:
    return DEFAULT.override(eig_rel=options.get("tol_eig"), gram=options.get("tol_gram"))


def _run_one(item):
    input_id, path, tol = item
    start = time.perf_counter()
    result = error = None
    try:
        result = classify_m1_3(read_scheme(path), tol)
    except (OSError, ParseError, SchemeError, ClassifierError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    elapsed = (time.perf_counter() - start) * 1000
    return RunResult(input_id, result, error, round(elapsed, 3))


def run_pipeline(manifest: RunManifest, workers: int | None = None) -> RunManifest:
    """Classify every input independently; failures are recorded, never raised."""
    ids = [i for i, _ in manifest.inputs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate input ids: {dupes}")
    workers = workers or int(manifest.options.get("workers", 1))
    tol = tolerances_from_options(manifest.options)
    items = [(i, p, tol) for i, p in manifest.inputs]
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, items))
    else:
        results = [_run_one(item) for item in items]
    results.sort(key=lambda r: r.id)
    return RunManifest(inputs=list(manifest.inputs), options=dict(manifest.options), results=results)
