"""Incremental classifiers behind a common ``train_one`` / ``predict_one`` API."""

from .base import NotFittedError, OnlineLearner
from .hoeffding import HoeffdingTree
from .knn import KNNClassifier
from .linear import PassiveAggressive, Perceptron, SGDClassifier
from .naive_bayes import GaussianNB, MultinomialNB

LEARNERS = {
    "knn": KNNClassifier,
    "gnb": GaussianNB,
    "mnb": MultinomialNB,
    "perceptron": Perceptron,
    "pa": PassiveAggressive,
    "sgd": SGDClassifier,
    "ht": HoeffdingTree,
}

_ALIASES = {
    "gaussiannb": "gnb",
    "multinomialnb": "mnb",
    "passiveaggressive": "pa",
    "sgdlinear": "sgd",
    "hoeffdingtree": "ht",
    "vfdt": "ht",
}


def canonical_name(kind: str) -> str:
    key = kind.lower().replace("_", "").replace("-", "")
    key = _ALIASES.get(key, key)
    if key not in LEARNERS:
        raise ValueError(f"unknown learner {kind!r}; choose from {sorted(LEARNERS)}")
    return key


def make_learner(kind: str, **params) -> OnlineLearner:
    return LEARNERS[canonical_name(kind)](**params)


__all__ = [
    "LEARNERS",
    "GaussianNB",
    "HoeffdingTree",
    "KNNClassifier",
    "MultinomialNB",
    "NotFittedError",
    "OnlineLearner",
    "PassiveAggressive",
    "Perceptron",
    "SGDClassifier",
    "canonical_name",
    "make_learner",
]
