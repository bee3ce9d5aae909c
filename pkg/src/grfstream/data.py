"""Stream sources: synthetic concept families, SEA, and delimited files."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

CONCEPT_FAMILIES = ("circle", "line", "sine", "sineh")

# Boundary parameters per family and concept. Both features are uniform on
# [0, 1] and every concept splits the unit square into roughly equal halves.
DEFAULT_CONCEPT_PARAMS = {
    "circle": {
        1: {"cx": 0.5, "cy": 0.5, "r": 0.4},
        2: {"cx": 0.4, "cy": 0.6, "r": 0.4},
    },
    "line": {
        1: {"a": 1.0, "b": 0.0},
        2: {"a": -1.0, "b": 1.0},
    },
    "sine": {
        1: {"offset": 0.5, "amplitude": 0.3, "frequency": 1.5, "phase": 0.0},
        2: {"offset": 0.5, "amplitude": 0.3, "frequency": 1.5, "phase": math.pi},
    },
    "sineh": {
        1: {"offset": 0.5, "amplitude": 0.25, "frequency": 3.0, "phase": 0.0},
        2: {"offset": 0.5, "amplitude": 0.25, "frequency": 3.0, "phase": math.pi},
    },
}

SEA_THRESHOLDS = {1: 8.0, 2: 9.0, 3: 7.0, 4: 9.5}


@dataclass
class Sample:
    features: np.ndarray
    label: int


class StreamSource:
    """Ordered, re-iterable sequence of samples with known shape."""

    def __init__(self, factory: Callable[[], Iterator[Sample]], length: int,
                 n_features: int, n_classes: int, name: str = "stream"):
        self._factory = factory
        self.length = length
        self.n_features = n_features
        self.n_classes = n_classes
        self.name = name

    @classmethod
    def from_arrays(cls, X, y, name="stream", n_classes=None) -> "StreamSource":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be 2-D with one row per label")

        def factory():
            for row, label in zip(X, y):
                yield Sample(row.copy(), int(label))

        src = cls(factory, X.shape[0], X.shape[1],
                  n_classes if n_classes is not None else int(y.max()) + 1 if y.size else 0, name)
        src._arrays = (X, y)
        return src

    def __iter__(self):
        return self._factory()

    def __len__(self):
        return self.length

    def materialize(self):
        """Return ``(X, y)`` arrays holding the whole stream."""
        arrays = getattr(self, "_arrays", None)
        if arrays is not None:
            return arrays[0].copy(), arrays[1].copy()
        X = np.empty((self.length, self.n_features))
        y = np.empty(self.length, dtype=np.int64)
        for i, s in enumerate(self):
            X[i] = s.features
            y[i] = s.label
        return X, y


@dataclass
class SyntheticSpec:
    family: str
    concept: int = 1
    base_size: int = 1000
    replications: int = 50
    seed: int = 0
    params: dict = field(default_factory=dict)
    redraw: bool = False

    def __post_init__(self):
        self.family = self.family.lower()
        if self.base_size < 1 or self.replications < 1:
            raise ValueError("base_size and replications must be >= 1")


def concept_labels(family: str, X, **params) -> np.ndarray:
    """Binary labels of points ``X`` (n, 2) under a concept boundary."""
    x1, x2 = X[:, 0], X[:, 1]
    if family == "circle":
        inside = (x1 - params["cx"]) ** 2 + (x2 - params["cy"]) ** 2 < params["r"] ** 2
        return inside.astype(np.int64)
    if family == "line":
        return (x2 > params["a"] * x1 + params["b"]).astype(np.int64)
    if family in ("sine", "sineh"):
        curve = params["offset"] + params["amplitude"] * np.sin(
            2.0 * math.pi * params["frequency"] * x1 + params["phase"])
        return (x2 > curve).astype(np.int64)
    raise ValueError(f"unknown concept family {family!r}; expected one of {CONCEPT_FAMILIES}")


def concept_params(family: str, concept: int, overrides: dict | None = None) -> dict:
    family = family.lower()
    if family not in DEFAULT_CONCEPT_PARAMS:
        raise ValueError(f"unknown concept family {family!r}; expected one of {CONCEPT_FAMILIES}")
    if concept not in DEFAULT_CONCEPT_PARAMS[family]:
        raise ValueError(f"concept must be 1 or 2, got {concept!r}")
    params = dict(DEFAULT_CONCEPT_PARAMS[family][concept])
    unknown = set(overrides or {}) - set(params)
    if unknown:
        raise ValueError(f"unknown {family} parameters: {sorted(unknown)}")
    params.update(overrides or {})
    return params


def gen_concept(spec: SyntheticSpec) -> StreamSource:
    """Uniform points on the unit square labelled by one concept.

    A block of ``base_size`` samples is drawn and repeated ``replications``
    times verbatim (or redrawn per block when ``spec.redraw`` is set).
    """
    params = concept_params(spec.family, spec.concept, spec.params)
    rng = np.random.default_rng(spec.seed)
    n_blocks = spec.replications if spec.redraw else 1
    blocks = [rng.random((spec.base_size, 2)) for _ in range(n_blocks)]
    if spec.redraw:
        X = np.concatenate(blocks)
    else:
        X = np.tile(blocks[0], (spec.replications, 1))
    y = concept_labels(spec.family, X, **params)
    return StreamSource.from_arrays(X, y, name=f"{spec.family}_concept{spec.concept}", n_classes=2)


def gen_sea(function_id: int, n: int, seed: int = 0, noise: float = 0.0,
            thresholds: dict | None = None) -> StreamSource:
    """SEA stream: three attributes uniform on [0, 10], label 1 iff a1 + a2 <= threshold.

    ``noise`` is the probability of flipping each label.
    """
    # keys may arrive as strings from a JSON config
    table = {**SEA_THRESHOLDS, **{int(k): float(v) for k, v in (thresholds or {}).items()}}
    if function_id not in table:
        raise ValueError(f"SEA function id must be one of {sorted(table)}, got {function_id!r}")
    if n < 0 or not 0.0 <= noise <= 1.0:
        raise ValueError("n must be >= 0 and noise in [0, 1]")
    rng = np.random.default_rng(seed)
    X = rng.random((n, 3)) * 10.0
    y = (X[:, 0] + X[:, 1] <= table[function_id]).astype(np.int64)
    if noise:
        flip = rng.random(n) < noise
        y[flip] = 1 - y[flip]
    return StreamSource.from_arrays(X, y, name=f"sea_f{function_id}", n_classes=2)


class StreamFormatError(ValueError):
    """Malformed delimited input."""


def _resolve_column(col, header, n_cols):
    if isinstance(col, str) and not col.lstrip("-").isdigit():
        if header is None or col not in header:
            raise StreamFormatError(f"unknown column {col!r}")
        return header.index(col)
    idx = int(col)
    if idx < 0:
        idx += n_cols
    if not 0 <= idx < n_cols:
        raise StreamFormatError(f"column index {col!r} out of range for {n_cols} columns")
    return idx


def load_stream(path, label_column=-1, feature_columns: Sequence | None = None,
                nominal_columns: Sequence = (), delimiter: str = ",", header: bool = True,
                limit: int | None = None) -> StreamSource:
    """Delimiter-separated file as a stream.

    Label values become dense class ids in order of first appearance, as do
    the values of ``nominal_columns``. The file is read once up front to
    validate it and fix the shape, and again (row by row) on each iteration,
    so memory stays bounded.
    """
    if limit is not None and limit < 0:
        raise ValueError("limit must be >= 0")

    def rows():
        with open(path, newline="") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            if header:
                next(reader, None)
            line_no = 1 if header else 0
            for record in reader:
                line_no += 1
                if not record or all(not cell.strip() for cell in record):
                    continue
                yield line_no, record

    with open(path, newline="") as fh:
        first = next(csv.reader(fh, delimiter=delimiter), None)
    if first is None:
        raise StreamFormatError(f"{path}: empty file")
    n_cols = len(first)
    names = [c.strip() for c in first] if header else None
    label_idx = _resolve_column(label_column, names, n_cols)
    if feature_columns is None:
        feat_idx = [i for i in range(n_cols) if i != label_idx]
    else:
        feat_idx = [_resolve_column(c, names, n_cols) for c in feature_columns]
    nominal_idx = {_resolve_column(c, names, n_cols) for c in nominal_columns}

    def parse():
        labels: dict = {}
        codes = {i: {} for i in nominal_idx}
        count = 0
        for line_no, record in rows():
            if limit is not None and count >= limit:
                return
            if len(record) != n_cols:
                raise StreamFormatError(
                    f"{path}: row {line_no} has {len(record)} fields, expected {n_cols}")
            x = np.empty(len(feat_idx))
            for k, i in enumerate(feat_idx):
                cell = record[i].strip()
                if i in nominal_idx:
                    x[k] = codes[i].setdefault(cell, len(codes[i]))
                    continue
                try:
                    x[k] = float(cell)
                except ValueError:
                    col = names[i] if names else i
                    raise StreamFormatError(
                        f"{path}: row {line_no}: non-numeric value {cell!r} in column {col!r}"
                    ) from None
            label = labels.setdefault(record[label_idx].strip(), len(labels))
            count += 1
            yield Sample(x, label), labels

    n = 0
    label_map: dict = {}
    for _, label_map in parse():
        n += 1

    def factory():
        for sample, _ in parse():
            yield sample

    src = StreamSource(factory, n, len(feat_idx), len(label_map), name=str(path))
    src.label_map = dict(label_map)
    return src
