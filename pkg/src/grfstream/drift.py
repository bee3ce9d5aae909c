"""ADWIN change detector over a stream of values in [0, 1].

The window is stored as an exponential histogram: row ``r`` holds up to
``f`` buckets, each summarising ``2**r`` consecutive values. When a row
overflows, its two oldest buckets merge into one bucket of the next row.

After every insertion each bucket boundary splits the window into an older
part W0 and a newer part W1; the older part is dropped (bucket by bucket,
oldest first) while some split satisfies

    |mean(W0) - mean(W1)| >= sqrt(ln(4 W / delta) / (2 m)),  m = 1 / (1/|W0| + 1/|W1|)

The kernels are compiled with numba; the window state lives in plain
numpy arrays so that a detector can be reset or copied cheaply.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

MAX_ROWS = 64


@njit(cache=True)
def _insert(sums, lens, totals, value, f):
    # newest bucket goes to the end of row 0
    sums[0, lens[0]] = value
    lens[0] += 1
    totals[0] += 1.0
    totals[1] += value
    r = 0
    while lens[r] > f:
        merged = sums[r, 0] + sums[r, 1]
        for i in range(2, lens[r]):
            sums[r, i - 2] = sums[r, i]
        lens[r] -= 2
        sums[r + 1, lens[r + 1]] = merged
        lens[r + 1] += 1
        r += 1


@njit(cache=True)
def _find_cut(sums, lens, totals, delta):
    width = totals[0]
    total = totals[1]
    if width < 2.0:
        return False
    bound = math.log(4.0 * width / delta)
    top = MAX_ROWS - 1
    while top > 0 and lens[top] == 0:
        top -= 1
    n0 = 0.0
    s0 = 0.0
    for r in range(top, -1, -1):
        size = 2.0 ** r
        for i in range(lens[r]):
            n0 += size
            s0 += sums[r, i]
            n1 = width - n0
            if n1 <= 0.0:
                return False
            diff = s0 / n0 - (total - s0) / n1
            m = 1.0 / (1.0 / n0 + 1.0 / n1)
            # diff**2 >= bound / (2m), without the square root
            if diff * diff * 2.0 * m >= bound:
                return True
    return False


@njit(cache=True)
def _drop_oldest(sums, lens, totals):
    top = MAX_ROWS - 1
    while top > 0 and lens[top] == 0:
        top -= 1
    totals[0] -= 2.0 ** top
    totals[1] -= sums[top, 0]
    for i in range(1, lens[top]):
        sums[top, i - 1] = sums[top, i]
    lens[top] -= 1


@njit(cache=True)
def _add(sums, lens, totals, value, delta, f):
    _insert(sums, lens, totals, value, f)
    drift = False
    while _find_cut(sums, lens, totals, delta):
        _drop_oldest(sums, lens, totals)
        drift = True
    return drift


@njit(cache=True)
def _add_many(sums, lens, totals, values, delta, f, out):
    n_drift = 0
    for i in range(values.shape[0]):
        if _add(sums, lens, totals, values[i], delta, f):
            out[n_drift] = i
            n_drift += 1
    return n_drift


_warm = False


def _warm_up():
    # load (or compile) the kernels now so the first timed call does not pay for it
    global _warm
    if not _warm:
        sums = np.zeros((MAX_ROWS, 3))
        lens = np.zeros(MAX_ROWS, dtype=np.int64)
        _add(sums, lens, np.zeros(2), 0.0, 0.5, 2)
        _add_many(sums, lens, np.zeros(2), np.zeros(1), 0.5, 2, np.zeros(1, dtype=np.int64))
        _warm = True


class Adwin:
    """Adaptive windowing drift detector.

    ``add_element`` returns True when the window was shrunk because the
    older and newer parts have significantly different means.
    """

    def __init__(self, delta: float = 0.002, f: int = 32):
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if int(f) != f or f < 2:
            raise ValueError("f must be an integer >= 2")
        self.delta = float(delta)
        self.f = int(f)
        _warm_up()
        self.reset()

    def reset(self):
        self._sums = np.zeros((MAX_ROWS, self.f + 1))
        self._lens = np.zeros(MAX_ROWS, dtype=np.int64)
        self._totals = np.zeros(2)  # width, sum
        self.n_detections = 0
        return self

    @property
    def width(self) -> int:
        return int(self._totals[0])

    @property
    def total(self) -> float:
        return float(self._totals[1])

    @property
    def mean(self) -> float:
        return self.total / self.width if self.width else 0.0

    @property
    def n_buckets(self) -> int:
        return int(self._lens.sum())

    def add_element(self, value: float) -> bool:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"ADWIN inputs must lie in [0, 1], got {value!r}")
        drift = _add(self._sums, self._lens, self._totals, float(value), self.delta, self.f)
        if drift:
            self.n_detections += 1
        return drift

    def add_many(self, values) -> np.ndarray:
        """Feed a whole sequence; return the indices at which drift was signalled."""
        values = np.ascontiguousarray(values, dtype=float)
        if values.size and not (values.min() >= 0.0 and values.max() <= 1.0):
            raise ValueError("ADWIN inputs must lie in [0, 1]")
        out = np.empty(values.shape[0], dtype=np.int64)
        k = _add_many(self._sums, self._lens, self._totals, values, self.delta, self.f, out)
        self.n_detections += k
        return out[:k].copy()

    def buckets(self):
        """(size, sum) of every bucket, oldest first."""
        rows = []
        for r in range(MAX_ROWS - 1, -1, -1):
            for i in range(self._lens[r]):
                rows.append((2**r, float(self._sums[r, i])))
        return rows
