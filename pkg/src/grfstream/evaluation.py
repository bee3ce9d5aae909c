"""Prequential bookkeeping: Kappa, sliding-window McNemar and run timing."""

from __future__ import annotations

import gc
import time
from collections import Counter, deque
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

#: chi-square(1) critical value at 95 % confidence
MCNEMAR_CRITICAL = 3.841459

BOTH_CORRECT, ONLY_A_WRONG, ONLY_B_WRONG, BOTH_WRONG = range(4)


class EvalLedger:
    """Confusion-matrix marginals accumulated one prediction at a time."""

    def __init__(self):
        self.true_counts: Counter = Counter()
        self.pred_counts: Counter = Counter()
        self.correct = 0
        self.n = 0

    def record(self, predicted, actual):
        self.true_counts[actual] += 1
        self.pred_counts[predicted] += 1
        self.correct += predicted == actual
        self.n += 1

    @property
    def accuracy(self) -> float:
        if self.n == 0:
            raise ValueError("empty ledger")
        return self.correct / self.n

    def chance_agreement(self) -> float:
        n = self.n
        return sum(c * self.pred_counts.get(k, 0) for k, c in self.true_counts.items()) / (n * n)

    def kappa(self) -> float:
        """Cohen's kappa; 0 when chance agreement is already perfect."""
        if self.n == 0:
            raise ValueError("kappa is undefined for an empty ledger")
        p_o = self.correct / self.n
        p_c = self.chance_agreement()
        if p_c == 1.0:
            return 0.0
        return (p_o - p_c) / (1.0 - p_c)


def kappa_from_counts(p_o: float, p_c: float) -> float:
    if p_c == 1.0:
        return 0.0
    return (p_o - p_c) / (1.0 - p_c)


def mcnemar_statistic(a: int, b: int) -> float:
    """``(a - b)**2 / (a + b)``, taken as 0 when there are no discordant pairs."""
    if a + b == 0:
        return 0.0
    return (a - b) ** 2 / (a + b)


class McNemarWindow:
    """McNemar test over the last ``size`` paired outcomes, evaluated every step.

    ``a`` counts samples only the first classifier got wrong, ``b`` those only
    the second one got wrong.
    """

    def __init__(self, size: int = 500, critical: float = MCNEMAR_CRITICAL):
        if size < 1:
            raise ValueError("window size must be positive")
        self.size = size
        self.critical = critical
        self._buffer: deque = deque()
        self.a = 0
        self.b = 0
        self.steps = 0
        self.rejections = 0
        self.last_statistic = 0.0

    def step(self, a_wrong: bool, b_wrong: bool) -> bool:
        outcome = _code(a_wrong, b_wrong)
        self._buffer.append(outcome)
        self._count(outcome, +1)
        if len(self._buffer) > self.size:
            self._count(self._buffer.popleft(), -1)
        self.last_statistic = mcnemar_statistic(self.a, self.b)
        reject = self.last_statistic > self.critical
        self.steps += 1
        self.rejections += reject
        return reject

    def _count(self, outcome, sign):
        if outcome == ONLY_A_WRONG:
            self.a += sign
        elif outcome == ONLY_B_WRONG:
            self.b += sign

    def outcomes(self) -> list[int]:
        return list(self._buffer)

    def rejection_percentage(self) -> float:
        if self.steps == 0:
            raise ValueError("no McNemar steps recorded")
        return 100.0 * self.rejections / self.steps


def _code(a_wrong, b_wrong) -> int:
    if a_wrong:
        return BOTH_WRONG if b_wrong else ONLY_A_WRONG
    return ONLY_B_WRONG if b_wrong else BOTH_CORRECT


def mcnemar_rejection_percentage(a_correct, b_correct, window: int = 500) -> float:
    """Rejection percentage of two aligned per-sample correctness sequences."""
    if len(a_correct) != len(b_correct):
        raise ValueError("paired sequences differ in length")
    win = McNemarWindow(window)
    for ca, cb in zip(a_correct, b_correct):
        win.step(not ca, not cb)
    return win.rejection_percentage()


class Stopwatch:
    """Accumulates process CPU time over one or more timed sections.

    The garbage collector is paused inside a section (as ``timeit`` does) so
    that collection pauses triggered by unrelated allocations do not land
    on whichever run happens to be active.
    """

    def __init__(self):
        self.elapsed = 0.0

    @contextmanager
    def running(self):
        was_enabled = gc.isenabled()
        gc.disable()
        start = time.process_time()
        try:
            yield self
        finally:
            self.elapsed += time.process_time() - start
            if was_enabled:
                gc.enable()


def timed(fn, *args, **kwargs):
    """Call ``fn`` and return ``(result, seconds)``."""
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


@dataclass
class RunReport:
    """Outcome of one test-then-train run (one arm, one repetition)."""

    learner: str
    grf: bool
    kappa: float
    accuracy: float
    n_evaluated: int
    n_drifts: int
    n_learner_resets: int
    n_detector_resets: int
    processing_time_s: float
    seed: int | None = None
    kappa_trajectory: list = field(default_factory=list)

    def record(self, with_timing: bool = True) -> dict:
        out = asdict(self)
        if not with_timing:
            out.pop("processing_time_s")
        return out
