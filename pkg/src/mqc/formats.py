"""JSON file formats.

Instance::

    {"num_spins": N, "h": [h_1, ..., h_N], "couplers": [[i, j, J_ij], ...]}

Samples::

    {"num_spins": N, "samples": [[+1, -1, ...], ...]}

Indices in files are 1-based.  A coupler given as ``[j, i, v]`` with
``j > i`` is canonicalised to ``(i, j)``; two entries naming the same pair
are an error, never merged.  Floats are written with Python's shortest
round-trip repr, so write -> read -> write is byte-identical.

Metadata sidecars live next to their file: ``out.json`` -> ``out.meta.json``.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Union

import numpy as np

from .errors import ParseError
from .ising import IsingModel

Source = Union[str, Path, IO[str]]


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), str(source)) from None


def _write_text(destination: Source, text: str) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def _dump(value: Any) -> str:
    return json.dumps(value, allow_nan=False)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_number(x: Any) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def _num_spins(doc: Any) -> int:
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    n = doc.get("num_spins")
    if not _is_int(n) or n < 1:
        raise ParseError("must be a positive integer", "num_spins")
    return n


def instance_to_json(model: IsingModel) -> str:
    lines = ["{", f'  "num_spins": {model.num_spins},',
             f'  "h": {_dump([float(x) for x in model.h])},']
    rows, cols, vals = model.edges
    entries = [f"    {_dump([int(i) + 1, int(j) + 1, float(v)])}" for i, j, v in zip(rows, cols, vals)]
    if entries:
        lines.append('  "couplers": [')
        lines.append(",\n".join(entries))
        lines.append("  ]")
    else:
        lines.append('  "couplers": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_from_json(text: str) -> IsingModel:
    doc = _load_json(text)
    n = _num_spins(doc)
    h = doc.get("h")
    if not isinstance(h, list) or len(h) != n:
        raise ParseError(f"must be a list of {n} numbers", "h")
    for k, x in enumerate(h):
        if not _is_number(x):
            raise ParseError("not a number", f"h[{k}]")
    couplers = doc.get("couplers", [])
    if not isinstance(couplers, list):
        raise ParseError("must be a list of [i, j, value] triples", "couplers")
    seen: dict[tuple[int, int], int] = {}
    triples = []
    for k, entry in enumerate(couplers):
        where = f"couplers[{k}]"
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ParseError("must be an [i, j, value] triple", where)
        i, j, v = entry
        if not (_is_int(i) and _is_int(j)) or not _is_number(v):
            raise ParseError("indices must be integers and value a number", where)
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"index outside 1..{n}", where)
        if i == j:
            raise ParseError("self-coupler", where)
        if v == 0:
            raise ParseError("zero coupler", where)
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise ParseError(f"duplicate pair {list(pair)} (also couplers[{seen[pair]}])", where)
        seen[pair] = k
        triples.append((pair[0] - 1, pair[1] - 1, float(v)))
    try:
        return IsingModel([float(x) for x in h], triples)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_instance(model: IsingModel, destination: Source) -> None:
    _write_text(destination, instance_to_json(model))


def read_instance(source: Source) -> IsingModel:
    return instance_from_json(_read_text(source))


def samples_to_json(samples: np.ndarray) -> str:
    samples = np.asarray(samples)
    rows = [f"    {_dump([int(s) for s in row])}" for row in samples]
    return ("{\n" f'  "num_spins": {samples.shape[1]},\n'
            '  "samples": [\n' + ",\n".join(rows) + "\n  ]\n}\n")


def samples_from_json(text: str) -> np.ndarray:
    doc = _load_json(text)
    n = _num_spins(doc)
    rows = doc.get("samples")
    if not isinstance(rows, list) or not rows:
        raise ParseError("must be a non-empty list of spin vectors", "samples")
    for k, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"must be a list of {n} spins", f"samples[{k}]")
        for m, s in enumerate(row):
            if not _is_int(s) or s not in (-1, 1):
                raise ParseError(f"spin value {s!r} is not -1 or +1", f"samples[{k}][{m}]")
    return np.array(rows, dtype=np.int8)


def write_samples(samples: np.ndarray, destination: Source) -> None:
    _write_text(destination, samples_to_json(samples))


def read_samples(source: Source) -> np.ndarray:
    return samples_from_json(_read_text(source))


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    return path.with_name(stem + ".meta.json")


def write_metadata(path: str | Path, metadata: dict) -> Path:
    """Write ``metadata`` as the sidecar of ``path``; returns the sidecar path."""
    target = sidecar_path(path)
    target.write_text(json.dumps(metadata, indent=2, sort_keys=True, allow_nan=False) + "\n",
                      encoding="utf-8")
    return target


@dataclass
class SuiteManifest:
    """A benchmark suite: one coefficient class on one Chimera spec."""

    coefficient_class: str
    spec: list[int]
    seeds: list[int] = field(default_factory=list)

    def instance_id(self, seed: int) -> str:
        m, c, k = self.spec
        return f"{self.coefficient_class}-{m}x{c}x{k}-s{seed}"

    @property
    def instance_ids(self) -> list[str]:
        return [self.instance_id(s) for s in self.seeds]

    def to_json(self) -> str:
        return json.dumps({"class": self.coefficient_class, "spec": self.spec, "seeds": self.seeds},
                          indent=2) + "\n"


def read_manifest(source: Source) -> SuiteManifest:
    doc = _load_json(_read_text(source))
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    cls = doc.get("class")
    if cls not in ("binary", "uniform", "normal"):
        raise ParseError("must be binary, uniform or normal", "class")
    spec = doc.get("spec")
    if not (isinstance(spec, list) and len(spec) == 3 and all(_is_int(x) and x >= 1 for x in spec)):
        raise ParseError("must be [M, C, K] with positive integers", "spec")
    seeds = doc.get("seeds")
    if not (isinstance(seeds, list) and seeds and all(_is_int(s) and 0 <= s < 2**64 for s in seeds)):
        raise ParseError("must be a non-empty list of 64-bit unsigned integers", "seeds")
    if len(set(seeds)) != len(seeds):
        raise ParseError("seeds must be distinct", "seeds")
    return SuiteManifest(cls, list(spec), list(seeds))


def write_manifest(manifest: SuiteManifest, destination: Source) -> None:
    _write_text(destination, manifest.to_json())
