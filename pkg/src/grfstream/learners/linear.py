"""Mistake- and margin-driven linear classifiers.

Two seen classes share a single weight vector (the larger label is the
positive side). From three classes on, every class gets its own
one-vs-rest vector and the highest score wins. Weights start at zero, so
training is deterministic.
"""

from __future__ import annotations

import bisect
import math
from operator import mul

import numpy as np

from .base import OnlineLearner, argmax_lowest


class _LinearModel(OnlineLearner):

    def _init_state(self):
        super()._init_state()
        self._w = {}  # label -> weight list
        self._b = {}  # label -> intercept
        self.classes_ = []
        self.t_ = 0  # weight-update steps taken

    def _register(self, y, d):
        if y in self._w:
            return
        if len(self.classes_) == 2:
            # leaving binary mode: the shared vector becomes two one-vs-rest rows
            lo, hi = self.classes_
            self._w[lo] = [-v for v in self._w[hi]]
            self._b[lo] = -self._b[hi]
        self._w[y] = [0.0] * d
        self._b[y] = 0.0
        bisect.insort(self.classes_, y)

    def _rows(self):
        return self.classes_[1:] if len(self.classes_) == 2 else self.classes_

    def score(self, label, x) -> float:
        return sum(map(mul, self._w[label], x)) + self._b[label]

    def set_weights(self, label, weights, intercept=0.0):
        """Overwrite the weight row of a seen class."""
        if label not in self._w:
            raise KeyError(label)
        self._w[label] = [float(v) for v in weights]
        self._b[label] = float(intercept)

    @property
    def coef_(self):
        """One row per seen class; in binary mode the rows are the shared vector and its negation."""
        if len(self.classes_) == 2:
            hi = np.array(self._w[self.classes_[1]])
            return np.array([-hi, hi])
        return np.array([self._w[c] for c in self.classes_])

    @property
    def intercept_(self):
        if len(self.classes_) == 2:
            hi = self._b[self.classes_[1]]
            return np.array([-hi, hi])
        return np.array([self._b[c] for c in self.classes_])

    def predict_one(self, x):
        self._require_fitted()
        x = self._check_sample(x)
        classes = self.classes_
        if len(classes) == 1:
            return classes[0]
        if len(classes) == 2:
            return classes[1] if self.score(classes[1], x) > 0 else classes[0]
        return argmax_lowest({c: self.score(c, x) for c in classes})

    def train_one(self, x, y):
        x = self._check_sample(x, y)
        y = int(y)
        self._register(y, len(x))
        self.n_seen += 1
        if len(self.classes_) < 2:
            return self
        self.t_ += 1
        self._begin_step(x)
        for label in self._rows():
            sign = 1.0 if label == y else -1.0
            self._update(label, x, sign, self.score(label, x))
        return self

    def _begin_step(self, x):
        pass

    def _update(self, label, x, sign, score):
        raise NotImplementedError

    def _step(self, label, x, step):
        w = self._w[label]
        for j, xj in enumerate(x):
            if xj:
                w[j] += step * xj
        if self.params["fit_intercept"]:
            self._b[label] += step


class Perceptron(_LinearModel):
    """Classic perceptron: ``w += eta * y * x`` on mistakes (``y * score <= 0``)."""

    name = "perceptron"

    def __init__(self, eta0: float = 1.0, fit_intercept: bool = True):
        if eta0 <= 0:
            raise ValueError("eta0 must be positive")
        super().__init__(eta0=eta0, fit_intercept=fit_intercept)

    def _update(self, label, x, sign, score):
        if sign * score <= 0:
            self._step(label, x, self.params["eta0"] * sign)


class PassiveAggressive(_LinearModel):
    """PA-I: step ``tau = min(C, hinge / ||x||^2)`` along ``y * x``."""

    name = "pa"

    def __init__(self, C: float = 1.0, fit_intercept: bool = True):
        if C <= 0:
            raise ValueError("C must be positive")
        super().__init__(C=C, fit_intercept=fit_intercept)

    def _begin_step(self, x):
        self._sqnorm = sum(map(mul, x, x))

    def _update(self, label, x, sign, score):
        loss = 1.0 - sign * score
        if loss <= 0.0 or self._sqnorm == 0.0:
            return
        tau = min(self.params["C"], loss / self._sqnorm)
        self._step(label, x, tau * sign)


class SGDClassifier(_LinearModel):
    """Hinge loss with L2 penalty ``alpha``, one gradient step per sample.

    ``learning_rate="invscaling"`` uses ``eta0 / t ** power_t``;
    ``"optimal"`` uses ``1 / (alpha * (t0 + t))`` with the usual heuristic
    ``t0``; ``"constant"`` keeps ``eta0``.
    """

    name = "sgd"

    def __init__(self, learning_rate: str = "optimal", eta0: float = 0.01, power_t: float = 0.5,
                 alpha: float = 1e-4, fit_intercept: bool = True):
        if learning_rate not in ("invscaling", "optimal", "constant"):
            raise ValueError(f"unknown learning_rate {learning_rate!r}")
        if eta0 <= 0 or alpha < 0:
            raise ValueError("eta0 must be positive and alpha non-negative")
        if learning_rate == "optimal" and alpha == 0:
            raise ValueError("the optimal schedule needs alpha > 0")
        super().__init__(learning_rate=learning_rate, eta0=eta0, power_t=power_t, alpha=alpha,
                         fit_intercept=fit_intercept)

    def _init_state(self):
        super()._init_state()
        if self.params["learning_rate"] == "optimal":
            # first step equals the typical weight scale sqrt(1 / sqrt(alpha))
            alpha = self.params["alpha"]
            self._t0 = 1.0 / (math.sqrt(1.0 / math.sqrt(alpha)) * alpha)

    def learning_rate(self, t: int) -> float:
        kind = self.params["learning_rate"]
        if kind == "invscaling":
            return self.params["eta0"] / t ** self.params["power_t"]
        if kind == "optimal":
            return 1.0 / (self.params["alpha"] * (self._t0 + t - 1))
        return self.params["eta0"]

    def _begin_step(self, x):
        self._eta = self.learning_rate(self.t_)

    def _update(self, label, x, sign, score):
        eta = self._eta
        alpha = self.params["alpha"]
        if alpha:
            decay = 1.0 - eta * alpha
            w = self._w[label]
            for j in range(len(w)):
                w[j] *= decay
        if sign * score < 1.0:
            self._step(label, x, eta * sign)
