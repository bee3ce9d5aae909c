"""Gaussian receptive field (GRF) population encoding.

Every real-valued feature is represented by its heights on ``n_grfs`` equally
spaced Gaussian curves covering the feature range ``[i_min, i_max]``. A sample
with ``d`` features becomes a vector of ``d * n_grfs`` values in ``(0, 1]``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: Width used when a feature has zero range (i_min == i_max).
WIDTH_FLOOR = 1e-9

WARM_START_FIXED = "warm-start-fixed"
ONLINE_UPDATE = "online-update"
LIMIT_STRATEGIES = (WARM_START_FIXED, ONLINE_UPDATE)


@dataclass(frozen=True)
class GrfConfig:
    """Number of curves per feature and the overlap factor ``gamma``.

    Small ``gamma`` gives wide, heavily overlapping curves.
    """

    n_grfs: int = 3
    gamma: float = 2.0

    def __post_init__(self):
        if int(self.n_grfs) != self.n_grfs or self.n_grfs < 3:
            raise ValueError(f"n_grfs must be an integer >= 3, got {self.n_grfs!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")


@dataclass(frozen=True)
class GrfField:
    center: float
    width: float


class FeatureLimits:
    """Per-feature ``[i_min, i_max]`` ranges."""

    def __init__(self, i_min: Sequence[float], i_max: Sequence[float]):
        i_min = np.array(i_min, dtype=float).reshape(-1)
        i_max = np.array(i_max, dtype=float).reshape(-1)
        if i_min.shape != i_max.shape:
            raise ValueError("i_min and i_max must have the same length")
        bad = np.flatnonzero(~(i_min <= i_max))
        if bad.size:
            raise ValueError(f"i_min > i_max for feature {int(bad[0])}")
        self.i_min = i_min
        self.i_max = i_max

    @classmethod
    def from_data(cls, X) -> "FeatureLimits":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("limits need a non-empty 2-D sample block")
        return cls(X.min(axis=0), X.max(axis=0))

    @property
    def n_features(self) -> int:
        return self.i_min.shape[0]

    def copy(self) -> "FeatureLimits":
        return FeatureLimits(self.i_min.copy(), self.i_max.copy())

    def __eq__(self, other):
        if not isinstance(other, FeatureLimits):
            return NotImplemented
        return np.array_equal(self.i_min, other.i_min) and np.array_equal(self.i_max, other.i_max)

    def __repr__(self):
        pairs = ", ".join(f"({lo:g}, {hi:g})" for lo, hi in zip(self.i_min, self.i_max))
        return f"FeatureLimits([{pairs}])"


def _spacing(i_min, i_max, n_grfs):
    return (i_max - i_min) / (n_grfs - 2)


def build_fields(i_min: float, i_max: float, config: GrfConfig) -> list[GrfField]:
    """Centers and widths of the curves for one feature range.

    Field ``i`` (1-based) is centered at ``i_min + (2i - 3)/2 * step`` where
    ``step = (i_max - i_min) / (n_grfs - 2)``; all fields share the width
    ``step / gamma``. The first and last centers lie half a step outside the range.
    """
    if not i_min <= i_max:
        raise ValueError(f"invalid limits ({i_min}, {i_max})")
    step = _spacing(i_min, i_max, config.n_grfs)
    width = max(step / config.gamma, WIDTH_FLOOR)
    return [
        GrfField(i_min + (2 * i - 3) / 2 * step, width)
        for i in range(1, config.n_grfs + 1)
    ]


def encode_feature(x: float, fields: Sequence[GrfField]) -> np.ndarray:
    centers = np.array([f.center for f in fields])
    widths = np.array([f.width for f in fields])
    return np.exp(-((x - centers) ** 2) / (2.0 * widths**2))


def update_limits(x, limits: FeatureLimits) -> FeatureLimits:
    """Return ``limits`` expanded to include sample ``x``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != limits.n_features:
        raise ValueError(
            f"sample has {x.shape[0]} features, limits cover {limits.n_features}"
        )
    return FeatureLimits(np.minimum(limits.i_min, x), np.maximum(limits.i_max, x))


class GrfEncoder:
    """Stateful encoder used by the harness.

    Limits are set once from a warm-start block (``fit``) and, with the
    ``online-update`` strategy, widened by every later sample. Centers and
    widths are cached and rebuilt only when the limits change.
    """

    def __init__(self, config: GrfConfig | None = None, strategy: str = WARM_START_FIXED):
        if strategy not in LIMIT_STRATEGIES:
            raise ValueError(f"unknown limit strategy {strategy!r}; expected one of {LIMIT_STRATEGIES}")
        self.config = config or GrfConfig()
        self.strategy = strategy
        self.limits: FeatureLimits | None = None
        self._dirty = True

    @property
    def n_features(self) -> int:
        return 0 if self.limits is None else self.limits.n_features

    @property
    def output_size(self) -> int:
        return self.n_features * self.config.n_grfs

    def set_limits(self, limits: FeatureLimits) -> "GrfEncoder":
        self.limits = limits
        self._dirty = True
        return self

    def fit(self, X) -> "GrfEncoder":
        return self.set_limits(FeatureLimits.from_data(X))

    def update_limits(self, x) -> bool:
        """Widen the limits to cover ``x``; return True if they changed."""
        if self.limits is None:
            x = np.asarray(x, dtype=float).reshape(-1)
            self.set_limits(FeatureLimits(x, x))
            return True
        lo, hi = self.limits.i_min, self.limits.i_max
        if len(x) == lo.shape[0] and all(a <= v <= b for v, a, b in zip(x, lo.tolist(), hi.tolist())):
            return False
        new = update_limits(x, self.limits)
        if new == self.limits:
            return False
        self.set_limits(new)
        return True

    def observe(self, x):
        if self.strategy == ONLINE_UPDATE:
            self.update_limits(x)

    def _rebuild(self):
        # z = (x - c) / w is evaluated as (x - i_min) / w - (c - i_min) / w, so the
        # only cancellation left is x - i_min itself
        lo, hi = self.limits.i_min, self.limits.i_max
        n = self.config.n_grfs
        step = _spacing(lo, hi, n)
        width = np.maximum(step / self.config.gamma, WIDTH_FLOOR)
        offsets = (2.0 * np.arange(1, n + 1) - 3.0) / 2.0
        self._lo = lo
        self._inv_w = 1.0 / width
        self._shift = offsets[None, :] * (step / width)[:, None]
        self._rows = [
            (float(a), float(b), tuple(c))
            for a, b, c in zip(lo.tolist(), self._inv_w.tolist(), self._shift.tolist())
        ]
        self._dirty = False

    def fields(self, feature: int) -> list[GrfField]:
        if self.limits is None:
            raise RuntimeError("encoder limits are not established")
        return build_fields(self.limits.i_min[feature], self.limits.i_max[feature], self.config)

    def encode(self, x) -> np.ndarray:
        if self.limits is None:
            raise RuntimeError("encoder limits are not established")
        x = np.asarray(x, dtype=float)
        if x.shape != (self.limits.n_features,):
            got = x.shape[0] if x.ndim == 1 else x.shape
            raise ValueError(
                f"dimension mismatch: sample has {got} features but limits cover "
                f"{self.limits.n_features}; first unmatched feature index is "
                f"{min(x.size, self.limits.n_features)}"
            )
        if self._dirty:
            self._rebuild()
        z = ((x - self._lo) * self._inv_w)[:, None] - self._shift
        return np.exp(-0.5 * z * z).reshape(-1)

    def encode_list(self, x: Sequence[float]) -> list[float]:
        """Same values as ``encode`` for a plain list, without numpy overhead."""
        if self._dirty:
            if self.limits is None:
                raise RuntimeError("encoder limits are not established")
            self._rebuild()
        if len(x) != len(self._rows):
            return self.encode(x).tolist()  # raises the dimension error
        exp = math.exp
        out = []
        for xj, (lo, inv_w, shifts) in zip(x, self._rows):
            u = (xj - lo) * inv_w
            out.extend([exp(-0.5 * (u - c) * (u - c)) for c in shifts])
        return out

    def encode_block(self, X) -> np.ndarray:
        """Encode a 2-D block of samples at once (same result as row-wise ``encode``)."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected shape (n, {self.n_features}), got {X.shape}")
        if self._dirty:
            self._rebuild()
        z = ((X - self._lo) * self._inv_w)[:, :, None] - self._shift[None]
        return np.exp(-0.5 * z * z).reshape(X.shape[0], -1)


def encode_sample(x, limits: FeatureLimits, config: GrfConfig) -> np.ndarray:
    """One-shot encoding of a single sample."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != limits.n_features:
        raise ValueError(
            f"dimension mismatch at feature index {min(x.shape[0], limits.n_features)}: "
            f"sample has {x.shape[0]} features, limits cover {limits.n_features}"
        )
    return GrfEncoder(config).set_limits(limits).encode(x)


def dump_encoding_grid(i_min: float, i_max: float, config: GrfConfig, resolution: int = 101):
    """Evaluate every field on ``resolution`` evenly spaced inputs over the range.

    Returns a list of ``(x, field_index, value)`` rows, field indices starting at 1.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    fields = build_fields(i_min, i_max, config)
    rows = []
    for x in np.linspace(i_min, i_max, resolution):
        for k, v in enumerate(encode_feature(x, fields), start=1):
            rows.append((float(x), k, float(v)))
    return rows


def write_grid(rows: Iterable[tuple], stream: io.TextIOBase | None = None, delimiter: str = "\t") -> str:
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["x", "field_index", "value"])
    for x, k, v in rows:
        writer.writerow([repr(x), k, repr(v)])
    return buf.getvalue() if stream is None else ""
