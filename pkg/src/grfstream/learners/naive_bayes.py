from __future__ import annotations

import math

from .base import OnlineLearner, argmax_lowest

_LOG_2PI = math.log(2.0 * math.pi)


class GaussianNB(OnlineLearner):
    """Gaussian naive Bayes with per-class running moments (Welford updates).

    Every class variance is inflated by ``var_smoothing`` times the largest
    per-feature variance of all data seen so far, as in the batch version.
    """

    name = "gnb"

    def __init__(self, var_smoothing: float = 1e-9):
        if var_smoothing < 0:
            raise ValueError("var_smoothing must be >= 0")
        super().__init__(var_smoothing=var_smoothing)

    def _init_state(self):
        super()._init_state()
        self._count = {}
        self._mean = {}
        self._m2 = {}
        # pooled moments for the smoothing term
        self._all_mean = None
        self._all_m2 = None

    def train_one(self, x, y):
        x = self._check_sample(x, y)
        y = int(y)
        if self._all_mean is None:
            self._all_mean = [0.0] * len(x)
            self._all_m2 = [0.0] * len(x)
        if y not in self._count:
            self._count[y] = 0
            self._mean[y] = [0.0] * len(x)
            self._m2[y] = [0.0] * len(x)
        n = self._count[y] = self._count[y] + 1
        self.n_seen += 1
        _welford(self._mean[y], self._m2[y], x, n)
        _welford(self._all_mean, self._all_m2, x, self.n_seen)
        return self

    def class_moments(self, y: int):
        """(count, mean, population variance) of class ``y``."""
        n = self._count[y]
        return n, list(self._mean[y]), [m / n for m in self._m2[y]]

    def joint_log_likelihood(self, x) -> dict:
        self._require_fitted()
        x = self._check_sample(x)
        eps = self.params["var_smoothing"] * max(self._all_m2, default=0.0) / self.n_seen
        eps = max(eps, 1e-300)
        out = {}
        for c, n in self._count.items():
            ll = math.log(n / self.n_seen)
            for xj, mu, m2 in zip(x, self._mean[c], self._m2[c]):
                var = m2 / n + eps
                d = xj - mu
                ll -= 0.5 * (_LOG_2PI + math.log(var) + d * d / var)
            out[c] = ll
        return out

    def predict_one(self, x):
        return argmax_lowest(self.joint_log_likelihood(x))


def _welford(mean, m2, x, n):
    for j, xj in enumerate(x):
        delta = xj - mean[j]
        mean[j] += delta / n
        m2[j] += delta * (xj - mean[j])


class MultinomialNB(OnlineLearner):
    """Multinomial naive Bayes on non-negative feature "counts".

    Class-conditional feature probabilities use additive smoothing ``alpha``.
    """

    name = "mnb"

    def __init__(self, alpha: float = 1.0):
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        super().__init__(alpha=alpha)

    def _init_state(self):
        super()._init_state()
        self._class_count = {}
        self._feature_count = {}
        self._total = {}

    def train_one(self, x, y):
        x = self._check_sample(x, y)
        if min(x, default=0.0) < 0:
            raise ValueError("MultinomialNB requires non-negative features")
        y = int(y)
        if y not in self._class_count:
            self._class_count[y] = 0
            self._feature_count[y] = [0.0] * len(x)
            self._total[y] = 0.0
        self._class_count[y] += 1
        fc = self._feature_count[y]
        for j, xj in enumerate(x):
            fc[j] += xj
        self._total[y] += sum(x)
        self.n_seen += 1
        return self

    def joint_log_likelihood(self, x) -> dict:
        self._require_fitted()
        x = self._check_sample(x)
        alpha = self.params["alpha"]
        d = len(x)
        mass = sum(x)
        out = {}
        for c, count in self._class_count.items():
            jll = math.log(count / self.n_seen)
            denom = self._total[c] + alpha * d
            if mass:
                jll -= mass * math.log(denom)
            for xj, fj in zip(x, self._feature_count[c]):
                if xj:
                    num = fj + alpha
                    if num <= 0.0:
                        jll = -math.inf
                        break
                    jll += xj * math.log(num)
            out[c] = jll
        return out

    def predict_proba_one(self, x) -> dict:
        """Posterior probability of every seen class."""
        jll = self.joint_log_likelihood(x)
        top = max(jll.values())
        weights = {c: math.exp(v - top) for c, v in jll.items()}
        total = sum(weights.values())
        return {c: w / total for c, w in weights.items()}

    def predict_one(self, x):
        return argmax_lowest(self.joint_log_likelihood(x))
