import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grfstream.learners import (
    LEARNERS,
    GaussianNB,
    HoeffdingTree,
    KNNClassifier,
    MultinomialNB,
    NotFittedError,
    PassiveAggressive,
    Perceptron,
    SGDClassifier,
    canonical_name,
    make_learner,
)
from grfstream.learners.base import argmax_lowest
from grfstream.learners.hoeffding import entropy, hoeffding_bound


def blobs(n=300, d=3, k=2, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, k, n)
    X = rng.normal(size=(n, d)) + 2.0 * y[:, None]
    return X, y


def blobs_for(kind, *args, **kwargs):
    X, y = blobs(*args, **kwargs)
    if kind == "mnb":
        X = X - X.min()  # multinomial NB needs non-negative inputs
    return X, y


def fit(learner, X, y):
    for x, t in zip(X, y):
        learner.train_one(x, int(t))
    return learner


# ---------------------------------------------------------------- common contract

@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_predict_before_training_raises(kind):
    with pytest.raises(NotFittedError):
        make_learner(kind).predict_one([0.0, 1.0])


@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_rejects_bad_labels_and_dimensions(kind):
    learner = make_learner(kind)
    with pytest.raises(ValueError):
        learner.train_one([0.5, 0.5], -1)
    with pytest.raises(ValueError):
        learner.train_one([0.5, 0.5], 1.5)
    learner.train_one([0.5, 0.5], 0)
    with pytest.raises(ValueError):
        learner.predict_one([0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        learner.predict_one(np.zeros((1, 2)))


@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_predict_does_not_change_state(kind):
    X, y = blobs_for(kind, 120)
    learner = fit(make_learner(kind), X[:100], y[:100])
    first = [learner.predict_one(x) for x in X[100:]]
    again = [learner.predict_one(x) for x in X[100:]]
    assert first == again


@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_reset_and_clone_give_fresh_learners(kind):
    X, y = blobs_for(kind, 200)
    a = fit(make_learner(kind), X, y)
    b = a.clone()
    assert b.n_seen == 0 and b.params == a.params
    a.reset()
    assert a.n_seen == 0
    fit(a, X, y)
    fit(b, X, y)
    assert [a.predict_one(x) for x in X[:50]] == [b.predict_one(x) for x in X[:50]]


GAUSSIAN_FRIENDLY = sorted(set(LEARNERS) - {"mnb"})


@pytest.mark.parametrize("kind", GAUSSIAN_FRIENDLY)
def test_learns_separable_blobs(kind):
    X, y = blobs(2000, seed=1)
    params = {"grace_period": 50} if kind == "ht" else {}
    learner = fit(make_learner(kind, **params), X[:1500], y[:1500])
    acc = np.mean([learner.predict_one(x) == t for x, t in zip(X[1500:], y[1500:])])
    assert acc > 0.85


@pytest.mark.parametrize("kind", GAUSSIAN_FRIENDLY)
def test_three_classes(kind):
    X, y = blobs(3000, d=2, k=3, seed=2)
    X = X * 3
    params = {"grace_period": 50} if kind == "ht" else {}
    learner = fit(make_learner(kind, **params), X[:2500], y[:2500])
    preds = [learner.predict_one(x) for x in X[2500:]]
    assert set(preds) <= {0, 1, 2}
    assert np.mean(np.array(preds) == y[2500:]) > 0.6


def test_single_class_predicts_it():
    for kind in LEARNERS:
        learner = make_learner(kind)
        learner.train_one([1.0, 2.0], 4)
        assert learner.predict_one([3.0, 0.0]) == 4


def test_registry_names():
    assert canonical_name("GaussianNB") == "gnb"
    assert canonical_name("hoeffding_tree") == "ht"
    assert canonical_name("passive-aggressive") == "pa"
    assert isinstance(make_learner("vfdt"), HoeffdingTree)
    with pytest.raises(ValueError):
        canonical_name("svm")


def test_argmax_lowest_breaks_ties_by_key():
    assert argmax_lowest({3: 1.0, 1: 1.0, 2: 0.5}) == 1
    assert argmax_lowest({0: -math.inf, 5: -1.0}) == 5


# ---------------------------------------------------------------- KNN

def knn_oracle(window, x, k):
    pts = np.array([w for w, _ in window])
    labels = [c for _, c in window]
    d = ((pts - x) ** 2).sum(axis=1)
    order = np.argsort(d, kind="stable")[:k]
    votes = {}
    for i in order:
        votes[labels[i]] = votes.get(labels[i], 0) + 1
    best = max(votes.values())
    return min(c for c, v in votes.items() if v == best)


def test_knn_window_is_fifo():
    knn = KNNClassifier(n_neighbors=1, max_window_size=3)
    for i in range(5):
        knn.train_one([float(i)], i % 2)
    assert [x for x, _ in knn.window()] == [[2.0], [3.0], [4.0]]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5), st.integers(5, 15))
def test_knn_matches_brute_force(seed, k, window):
    rng = np.random.default_rng(seed)
    knn = KNNClassifier(n_neighbors=k, max_window_size=window)
    # coarse grid so equal distances and vote ties actually occur
    X = rng.integers(0, 3, size=(40, 2)).astype(float)
    y = rng.integers(0, 3, 40)
    for x, t in zip(X, y):
        knn.train_one(x, int(t))
    for q in rng.integers(0, 3, size=(10, 2)).astype(float):
        assert knn.predict_one(q) == knn_oracle(knn.window(), q, k)


def test_knn_vote_tie_goes_to_lowest_class():
    knn = KNNClassifier(n_neighbors=2, max_window_size=2)
    knn.train_one([0.0], 3)
    knn.train_one([0.0], 1)
    assert knn.predict_one([0.0]) == 1


def test_knn_validation():
    with pytest.raises(ValueError):
        KNNClassifier(n_neighbors=5, max_window_size=3)
    with pytest.raises(ValueError):
        KNNClassifier(n_neighbors=0)


# ---------------------------------------------------------------- naive Bayes

def test_gnb_moments_match_batch():
    X, y = blobs(500, d=4, k=3)
    gnb = fit(GaussianNB(), X, y)
    for c in range(3):
        n, mean, var = gnb.class_moments(c)
        rows = X[y == c]
        assert n == len(rows)
        np.testing.assert_allclose(mean, rows.mean(axis=0), rtol=1e-12)
        np.testing.assert_allclose(var, rows.var(axis=0), rtol=1e-10)


def test_gnb_log_likelihood_matches_batch_formula():
    X, y = blobs(400, d=3, k=2, seed=4)
    gnb = fit(GaussianNB(var_smoothing=1e-3), X, y)
    eps = 1e-3 * X.var(axis=0).max()
    q = np.array([0.3, 1.2, -0.4])
    jll = gnb.joint_log_likelihood(q)
    for c in (0, 1):
        rows = X[y == c]
        var = rows.var(axis=0) + eps
        expected = math.log(len(rows) / len(X)) - 0.5 * np.sum(
            np.log(2 * np.pi * var) + (q - rows.mean(axis=0)) ** 2 / var)
        assert jll[c] == pytest.approx(expected, rel=1e-10)


def test_gnb_constant_feature_does_not_break():
    gnb = GaussianNB()
    for i in range(10):
        gnb.train_one([1.0, float(i)], int(i > 4))
    assert gnb.predict_one([1.0, 8.0]) == 1


def test_mnb_matches_batch_formula():
    rng = np.random.default_rng(5)
    X = rng.integers(0, 5, size=(200, 4)).astype(float)
    y = rng.integers(0, 2, 200)
    mnb = fit(MultinomialNB(alpha=0.5), X, y)
    q = np.array([1.0, 0.0, 3.0, 2.0])
    jll = mnb.joint_log_likelihood(q)
    for c in (0, 1):
        counts = X[y == c].sum(axis=0) + 0.5
        expected = math.log(np.mean(y == c)) + np.sum(q * np.log(counts / counts.sum()))
        assert jll[c] == pytest.approx(expected, rel=1e-12)
    proba = mnb.predict_proba_one(q)
    assert sum(proba.values()) == pytest.approx(1.0)


def test_mnb_separates_count_profiles():
    rng = np.random.default_rng(6)
    y = rng.integers(0, 3, 900)
    profiles = np.array([[0.6, 0.2, 0.2], [0.2, 0.6, 0.2], [0.2, 0.2, 0.6]])
    X = np.array([rng.multinomial(20, profiles[c]) for c in y], dtype=float)
    mnb = fit(MultinomialNB(), X[:600], y[:600])
    assert np.mean([mnb.predict_one(x) == t for x, t in zip(X[600:], y[600:])]) > 0.9


def test_mnb_rejects_negative_features():
    with pytest.raises(ValueError):
        MultinomialNB().train_one([1.0, -0.1], 0)


def test_mnb_zero_alpha_unseen_feature():
    mnb = MultinomialNB(alpha=0.0)
    mnb.train_one([1.0, 0.0], 0)
    mnb.train_one([0.0, 1.0], 1)
    assert mnb.joint_log_likelihood([0.0, 2.0])[0] == -math.inf
    assert mnb.predict_one([0.0, 2.0]) == 1


# ---------------------------------------------------------------- linear models

def test_perceptron_updates_only_on_mistakes():
    p = Perceptron()
    p.train_one([1.0, 0.0], 0)  # one class: no update yet
    p.train_one([0.0, 1.0], 1)  # score 0 counts as a mistake
    np.testing.assert_array_equal(p.coef_[1], [0.0, 1.0])
    assert p.intercept_[1] == 1.0
    before = p.coef_.copy()
    p.train_one([0.0, 2.0], 1)  # correct side, no change
    np.testing.assert_array_equal(p.coef_, before)


def test_binary_mode_shares_one_vector():
    p = fit(Perceptron(), *blobs(100))
    np.testing.assert_array_equal(p.coef_[0], -p.coef_[1])


def test_pa_step_size():
    pa = PassiveAggressive(C=10.0, fit_intercept=False)
    pa.train_one([1.0, 1.0], 0)
    pa.train_one([2.0, 0.0], 1)  # hinge loss 1, |x|^2 = 4, so tau = 0.25
    np.testing.assert_allclose(pa.coef_[1], [0.5, 0.0])
    capped = PassiveAggressive(C=0.1, fit_intercept=False)
    capped.train_one([1.0, 1.0], 0)
    capped.train_one([2.0, 0.0], 1)
    np.testing.assert_allclose(capped.coef_[1], [0.2, 0.0])


def test_pa_after_one_step_satisfies_margin():
    pa = PassiveAggressive(C=1e9, fit_intercept=False)
    pa.train_one([0.0, 1.0], 0)
    pa.train_one([0.3, -0.7], 1)
    assert pa.score(1, [0.3, -0.7]) == pytest.approx(1.0)


def test_sgd_schedules():
    inv = SGDClassifier(learning_rate="invscaling", eta0=0.01, power_t=0.5)
    assert inv.learning_rate(4) == pytest.approx(0.005)
    const = SGDClassifier(learning_rate="constant", eta0=0.2)
    assert const.learning_rate(100) == 0.2
    opt = SGDClassifier(alpha=1e-4)
    t0 = 1.0 / (math.sqrt(1.0 / math.sqrt(1e-4)) * 1e-4)
    assert opt.learning_rate(1) == pytest.approx(1.0 / (1e-4 * t0))
    with pytest.raises(ValueError):
        SGDClassifier(learning_rate="adaptive")


def test_sgd_single_step():
    sgd = SGDClassifier(learning_rate="constant", eta0=0.1, alpha=0.5, fit_intercept=False)
    sgd.train_one([0.0, 0.0], 0)
    sgd.train_one([0.0, 0.0], 1)  # zero input: only the (no-op) decay happens
    sgd.set_weights(1, [1.0, 1.0])
    sgd.train_one([0.0, 0.2], 1)  # margin 0.2 < 1: decay, then hinge step
    np.testing.assert_allclose(sgd.coef_[1], [0.95, 0.95 + 0.1 * 0.2])


@pytest.mark.parametrize("kind", ["perceptron", "pa", "sgd"])
def test_zero_feature_does_not_change_predictions(kind):
    X, y = blobs(300, k=3)
    a = fit(make_learner(kind), X, y)
    Xz = np.hstack([X, np.zeros((len(X), 1))])
    b = fit(make_learner(kind), Xz, y)
    assert np.all(b.coef_[:, -1] == 0)
    assert [a.predict_one(x) for x in X] == [b.predict_one(x) for x in Xz]


# ---------------------------------------------------------------- Hoeffding tree

def test_entropy_and_bound():
    assert entropy([5, 5]) == pytest.approx(1.0)
    assert entropy([4, 0]) == 0.0
    assert entropy([]) == 0.0
    assert hoeffding_bound(1.0, 1e-7, 200) == pytest.approx(math.sqrt(math.log(1e7) / 400))


def test_ht_infinite_grace_is_majority_baseline():
    X, y = blobs(500)
    ht = fit(HoeffdingTree(grace_period=math.inf, leaf_prediction="mc"), X, y)
    assert ht.n_splits == 0
    majority = int(np.bincount(y).argmax())
    assert {ht.predict_one(x) for x in X} == {majority}


def test_ht_splits_on_decisive_binary_attribute():
    rng = np.random.default_rng(7)
    n = 400
    X = rng.random((n, 4))
    X[:, 2] = rng.integers(0, 2, n)
    y = X[:, 2].astype(int)
    ht = HoeffdingTree(grace_period=200)
    split_at = None
    for i, (x, t) in enumerate(zip(X, y), start=1):
        ht.train_one(x, t)
        if split_at is None and ht.n_splits:
            split_at = i
    # the decisive attribute has gain 1 bit; the bound at n = 200 is about 0.2
    assert split_at is not None and split_at <= 400
    assert ht._root.feature == 2
    assert 0.0 < ht._root.threshold < 1.0
    assert all(ht.predict_one(x) == t for x, t in zip(X, y))


def test_ht_brute_force_gain_agrees_with_choice():
    # all candidate gains computed independently from the Gaussian summaries
    from scipy.stats import norm

    X, y = blobs(400, d=3, seed=11)
    ht = HoeffdingTree(grace_period=10**9)
    fit(ht, X, y)
    leaf = ht._root
    candidates = leaf.best_splits(10)
    for j in range(3):
        best = -1.0
        lo, hi = X[:, j].min(), X[:, j].max()
        for k in range(1, 11):
            thr = lo + k / 11 * (hi - lo)
            left, right = [], []
            for c in (0, 1):
                rows = X[y == c, j]
                frac = norm.cdf(thr, rows.mean(), rows.std())
                left.append(len(rows) * frac)
                right.append(len(rows) * (1 - frac))
            nl, nr = sum(left), sum(right)
            gain = entropy(np.bincount(y)) - (nl * entropy(left) + nr * entropy(right)) / len(y)
            best = max(best, gain)
        assert candidates[j][0] == pytest.approx(best, rel=1e-9)


def test_ht_grows_on_axis_aligned_concept():
    rng = np.random.default_rng(3)
    X = rng.random((6000, 2))
    y = ((X[:, 0] > 0.3) & (X[:, 1] > 0.6)).astype(int)
    ht = fit(HoeffdingTree(grace_period=100), X[:5000], y[:5000])
    assert ht.n_splits >= 3 and ht.n_leaves == ht.n_splits + 1 and ht.depth >= 2
    acc = np.mean([ht.predict_one(x) == t for x, t in zip(X[5000:], y[5000:])])
    assert acc > 0.9


@pytest.mark.parametrize("mode", ["mc", "nb", "nba"])
def test_ht_leaf_prediction_modes(mode):
    rng = np.random.default_rng(9)
    y = rng.integers(0, 2, 1000)
    X = rng.normal(size=(1000, 3))
    X[:, 1] += 3.0 * y  # one informative attribute, so the root splits early
    ht = fit(HoeffdingTree(leaf_prediction=mode), X[:800], y[:800])
    acc = np.mean([ht.predict_one(x) == t for x, t in zip(X[800:], y[800:])])
    assert acc > 0.85


def test_ht_validation():
    with pytest.raises(ValueError):
        HoeffdingTree(grace_period=0)
    with pytest.raises(ValueError):
        HoeffdingTree(split_confidence=1.5)
    with pytest.raises(ValueError):
        HoeffdingTree(leaf_prediction="vote")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 2.0))
def test_mnb_posterior_never_zero_for_seen_class(seed, alpha):
    rng = np.random.default_rng(seed)
    mnb = MultinomialNB(alpha=alpha)
    # a class whose training rows are all zero still has a smoothed likelihood
    fit(mnb, rng.random((30, 6)) * (rng.random(6) < 0.5), rng.integers(0, 3, 30))
    probs = mnb.predict_proba_one(rng.random(6))
    assert all(math.isfinite(v) for v in mnb.joint_log_likelihood(rng.random(6)).values())
    assert all(p > 0 for p in probs.values())
    assert sum(probs.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_identical_sequences_give_identical_predictions(kind):
    X, y = blobs_for(kind, n=400, seed=4)

    def trace():
        learner, out = make_learner(kind), []
        for x, t in zip(X, y):
            if learner.n_seen:
                out.append(learner.predict_one(x))
            learner.train_one(x, int(t))
        return out

    assert trace() == trace()
