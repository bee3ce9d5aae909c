"""Hoeffding tree (VFDT) for numeric attributes.

Each leaf keeps, per class and attribute, a running Gaussian summary
(count, mean, variance, min, max). Every ``grace_period`` samples a leaf
scores ``n_split_points`` candidate thresholds per attribute by information
gain, estimating the class counts on each side from the Gaussian CDFs, and
splits when the best candidate beats the runner-up by more than the
Hoeffding bound (or the bound has shrunk below ``tie_threshold``).

Leaves predict with the majority class (``"mc"``), with naive Bayes over the
same Gaussian summaries (``"nb"``), or adaptively (``"nba"``, the default):
each leaf keeps score of which of the two would have been right on the
samples it has trained on and uses the better one.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .base import OnlineLearner, argmax_lowest


_LOG_2PI = math.log(2.0 * math.pi)
LEAF_PREDICTIONS = ("mc", "nb", "nba")


def entropy(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def hoeffding_bound(value_range: float, confidence: float, n: float) -> float:
    return math.sqrt(value_range * value_range * math.log(1.0 / confidence) / (2.0 * n))


class _Leaf:
    """Class counts plus per-class Gaussian summaries of every attribute."""

    __slots__ = ("class_counts", "stats", "weight_at_last_eval", "mc_correct", "nb_correct")

    def __init__(self, class_counts=None):
        self.class_counts = dict(class_counts or {})
        # label -> [n, mean, m2, lo, hi]; the last four are per-attribute lists
        self.stats = {}
        self.weight_at_last_eval = self.weight
        self.mc_correct = 0.0
        self.nb_correct = 0.0

    def majority(self):
        return argmax_lowest(self.class_counts) if self.class_counts else None

    def naive_bayes(self, x):
        """Class with the highest Gaussian naive Bayes score, or None without statistics."""
        if not self.stats:
            return self.majority()
        total = self.weight
        var_floor = 1e-300
        for st in self.stats.values():
            if st[0] > 0:
                var_floor = max(var_floor, 1e-9 * max(st[2]) / st[0])
        scores = {}
        for c, count in self.class_counts.items():
            if count <= 0:
                continue
            ll = math.log(count / total)
            st = self.stats.get(c)
            if st is not None:
                n = st[0]
                for xj, mu, m2 in zip(x, st[1], st[2]):
                    var = m2 / n + var_floor
                    d = xj - mu
                    ll -= 0.5 * (_LOG_2PI + math.log(var) + d * d / var)
            scores[c] = ll
        return argmax_lowest(scores) if scores else None

    @property
    def weight(self):
        return float(sum(self.class_counts.values()))

    def learn(self, x, y):
        self.class_counts[y] = self.class_counts.get(y, 0.0) + 1.0
        st = self.stats.get(y)
        if st is None:
            st = self.stats[y] = [0, [0.0] * len(x), [0.0] * len(x), list(x), list(x)]
        st[0] += 1
        n = st[0]
        mean, m2, lo, hi = st[1], st[2], st[3], st[4]
        for j, xj in enumerate(x):
            delta = xj - mean[j]
            mean[j] += delta / n
            m2[j] += delta * (xj - mean[j])
            if xj < lo[j]:
                lo[j] = xj
            elif xj > hi[j]:
                hi[j] = xj

    def best_splits(self, n_split_points):
        """Best (gain, threshold, left_counts, right_counts) per attribute, or None."""
        labels = sorted(self.stats)
        n = np.array([self.stats[c][0] for c in labels], dtype=float)
        mean = np.array([self.stats[c][1] for c in labels])
        std = np.sqrt(np.array([self.stats[c][2] for c in labels]) / n[:, None])
        lo = np.array([self.stats[c][3] for c in labels]).min(axis=0)
        hi = np.array([self.stats[c][4] for c in labels]).max(axis=0)
        h_parent = entropy(n)
        total = n.sum()
        frac = np.arange(1, n_split_points + 1) / (n_split_points + 1)
        out = []
        for j in range(mean.shape[1]):
            if not hi[j] > lo[j]:
                out.append(None)
                continue
            thresholds = lo[j] + frac * (hi[j] - lo[j])
            mu = mean[:, j][:, None]
            sd = std[:, j][:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                z = np.where(sd > 0, (thresholds[None, :] - mu) / sd,
                             np.where(thresholds[None, :] >= mu, np.inf, -np.inf))
            left = n[:, None] * ndtr(z)  # (classes, thresholds)
            right = n[:, None] - left
            nl = left.sum(axis=0)
            nr = right.sum(axis=0)
            gain = h_parent - (nl * _entropy_cols(left) + nr * _entropy_cols(right)) / total
            # a split that sends everything one way is no split
            gain = np.where((nl > 0) & (nr > 0), gain, -np.inf)
            best = int(np.argmax(gain))
            if not np.isfinite(gain[best]):
                out.append(None)
                continue
            lc = dict(zip(labels, left[:, best].tolist()))
            rc = dict(zip(labels, right[:, best].tolist()))
            out.append((float(gain[best]), float(thresholds[best]), lc, rc))
        return out


def _entropy_cols(counts):
    totals = counts.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(counts > 0, counts / totals, 0.0)
        return -np.sum(np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0), axis=0)


class _Split:
    __slots__ = ("feature", "threshold", "left", "right")

    def __init__(self, feature, threshold, left, right):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


class HoeffdingTree(OnlineLearner):
    """Incremental decision tree over numeric attributes."""

    name = "ht"

    def __init__(self, grace_period: float = 200, split_confidence: float = 1e-7,
                 tie_threshold: float = 0.05, n_split_points: int = 10, leaf_prediction: str = "nba"):
        if leaf_prediction not in LEAF_PREDICTIONS:
            raise ValueError(f"leaf_prediction must be one of {LEAF_PREDICTIONS}")
        if not grace_period > 0:
            raise ValueError("grace_period must be positive")
        if not 0 < split_confidence < 1:
            raise ValueError("split_confidence must lie in (0, 1)")
        if tie_threshold < 0 or n_split_points < 1:
            raise ValueError("tie_threshold must be >= 0 and n_split_points >= 1")
        super().__init__(grace_period=grace_period, split_confidence=split_confidence,
                         tie_threshold=tie_threshold, n_split_points=n_split_points,
                         leaf_prediction=leaf_prediction)

    def _init_state(self):
        super()._init_state()
        self._root = None
        self.n_splits = 0

    def _sort(self, x):
        """Return (leaf, parent split, side) for ``x``."""
        node, parent, side = self._root, None, None
        while isinstance(node, _Split):
            parent = node
            if x[node.feature] <= node.threshold:
                node, side = node.left, "left"
            else:
                node, side = node.right, "right"
        return node, parent, side

    def train_one(self, x, y):
        x = self._check_sample(x, y)
        y = int(y)
        if self._root is None:
            self._root = _Leaf()
        leaf, parent, side = self._sort(x)
        if self.params["leaf_prediction"] == "nba" and leaf.class_counts:
            leaf.mc_correct += leaf.majority() == y
            leaf.nb_correct += leaf.naive_bayes(x) == y
        leaf.learn(x, y)
        self.n_seen += 1
        if leaf.weight - leaf.weight_at_last_eval >= self.params["grace_period"]:
            split = self._attempt_split(leaf)
            if split is not None:
                if parent is None:
                    self._root = split
                else:
                    setattr(parent, side, split)
                self.n_splits += 1
            else:
                leaf.weight_at_last_eval = leaf.weight
        return self

    def _attempt_split(self, leaf):
        if len(leaf.stats) < 2:
            return None
        candidates = leaf.best_splits(self.params["n_split_points"])
        # highest gain first, lowest attribute index on ties
        ranked = sorted(
            ((c[0], j) for j, c in enumerate(candidates) if c is not None),
            key=lambda item: (-item[0], item[1]),
        )
        if not ranked:
            return None
        best_gain, feature = ranked[0]
        # merit of not splitting at all is zero
        second = max(ranked[1][0], 0.0) if len(ranked) > 1 else 0.0
        if best_gain <= 0:
            return None
        n_classes = max(sum(1 for v in leaf.class_counts.values() if v > 0), 2)
        eps = hoeffding_bound(math.log2(n_classes), self.params["split_confidence"], leaf.weight)
        if best_gain - second > eps or eps < self.params["tie_threshold"]:
            _, threshold, left, right = candidates[feature]
            return _Split(feature, threshold, _Leaf(left), _Leaf(right))
        return None

    def predict_one(self, x):
        self._require_fitted()
        x = self._check_sample(x)
        leaf = self._sort(x)[0]
        if not any(v > 0 for v in leaf.class_counts.values()):
            return argmax_lowest(self._total_counts())
        mode = self.params["leaf_prediction"]
        if mode == "nb" or (mode == "nba" and leaf.nb_correct > leaf.mc_correct):
            return leaf.naive_bayes(x)
        return leaf.majority()

    def _total_counts(self):
        total = {}
        stack = [self._root]
        while stack:
            node = stack.pop()
            if isinstance(node, _Split):
                stack.extend((node.left, node.right))
            else:
                for c, v in node.class_counts.items():
                    total[c] = total.get(c, 0.0) + v
        return total

    @property
    def n_leaves(self):
        return self.n_splits + (self._root is not None)

    @property
    def depth(self):
        def walk(node):
            if isinstance(node, _Split):
                return 1 + max(walk(node.left), walk(node.right))
            return 0
        return 0 if self._root is None else walk(self._root)
