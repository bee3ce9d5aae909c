from __future__ import annotations

from collections import Counter, deque

from .base import OnlineLearner, argmax_lowest


class KNNClassifier(OnlineLearner):
    """k-nearest neighbours over a FIFO window of the latest training samples.

    Search is exhaustive (the window is small), so ``leaf_size`` is accepted
    for configuration compatibility only. Equidistant neighbours are taken
    oldest first; vote ties go to the lowest class id.
    """

    name = "knn"

    def __init__(self, n_neighbors: int = 3, max_window_size: int = 10, leaf_size: int = 2):
        if n_neighbors < 1 or max_window_size < 1 or leaf_size < 1:
            raise ValueError("n_neighbors, max_window_size and leaf_size must be positive")
        if n_neighbors > max_window_size:
            raise ValueError("n_neighbors cannot exceed max_window_size")
        super().__init__(n_neighbors=n_neighbors, max_window_size=max_window_size, leaf_size=leaf_size)

    def _init_state(self):
        super()._init_state()
        self._window = deque(maxlen=self.params["max_window_size"])

    def train_one(self, x, y):
        x = self._check_sample(x, y)
        self._window.append((x, int(y)))
        self.n_seen += 1
        return self

    def window(self):
        """Window contents as ``(features, label)`` pairs, oldest first."""
        return [(list(x), y) for x, y in self._window]

    def predict_one(self, x):
        self._require_fitted()
        x = self._check_sample(x)
        dist = []
        for i, (xi, yi) in enumerate(self._window):
            s = 0.0
            for a, b in zip(xi, x):
                d = a - b
                s += d * d
            dist.append((s, i, yi))
        dist.sort()
        votes = Counter(yi for _, _, yi in dist[: self.params["n_neighbors"]])
        return argmax_lowest(votes)
