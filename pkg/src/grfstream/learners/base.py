from __future__ import annotations

import copy

import numpy as np


class NotFittedError(RuntimeError):
    """Raised when a learner is asked to predict before any training sample."""


class OnlineLearner:
    """Train-one / predict-one contract shared by every classifier.

    Class labels are non-negative integers. Feature vectors may be any
    sequence of floats; the hot paths work on plain lists because vectors
    here are short and per-element Python arithmetic beats numpy call
    overhead at that size. Subclasses keep hyperparameters in
    ``self.params`` and build mutable state in ``_init_state``, which
    ``reset`` calls again.
    """

    name = "base"

    def __init__(self, **params):
        self.params = params
        self._init_state()

    def _init_state(self):
        self.n_seen = 0
        self.n_features = None

    def reset(self):
        self._init_state()
        return self

    def clone(self):
        return type(self)(**copy.deepcopy(self.params))

    def _check_sample(self, x, y=None):
        if isinstance(x, np.ndarray):
            if x.ndim != 1:
                raise ValueError(f"expected a 1-D feature vector, got shape {x.shape}")
            x = x.tolist()
        elif not isinstance(x, list):
            x = [float(v) for v in x]
        if self.n_features is None:
            if y is None:
                raise NotFittedError(f"{self.name} has not been trained")
            self.n_features = len(x)
        elif len(x) != self.n_features:
            raise ValueError(f"{self.name} expects {self.n_features} features, got {len(x)}")
        if y is not None and (y < 0 or int(y) != y):
            raise ValueError(f"class labels must be non-negative integers, got {y!r}")
        return x

    def _require_fitted(self):
        if self.n_seen == 0:
            raise NotFittedError(f"{self.name} has not been trained")

    def predict_one(self, x) -> int:
        raise NotImplementedError

    def train_one(self, x, y: int):
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


def argmax_lowest(scores: dict):
    """Key with the highest score; the lowest key wins ties."""
    best, best_score = None, None
    for key in sorted(scores):
        s = scores[key]
        if best is None or s > best_score:
            best, best_score = key, s
    return best
