import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbqe.bayes import NaiveBayesModel, fit, gaussian_logpdf
from nbqe.errors import DataError, UsageError
from nbqe.grading import GRADES, Grade

P, A, G, E = Grade.POOR, Grade.AVERAGE, Grade.GOOD, Grade.EXCELLENT


def linear_space_posteriors(model, x):
    """Bayes rule with explicit densities and normalization, no logs."""
    joint = []
    for c in range(len(model.priors)):
        p = model.priors[c]
        for i, xi in enumerate(x):
            m, v = model.means[c, i], model.variances[c, i]
            p *= math.exp(-((xi - m) ** 2) / (2 * v)) / math.sqrt(2 * math.pi * v)
        joint.append(p)
    evidence = sum(joint)
    return [j / evidence for j in joint]


def random_model(rng, n_features):
    priors = rng.dirichlet(np.ones(4))
    means = rng.uniform(-2, 2, size=(4, n_features))
    variances = rng.uniform(0.5, 3.0, size=(4, n_features))
    return NaiveBayesModel(priors, means, variances, 1e-12, 0)


def test_priors_laplace():
    m = fit(np.arange(10.0).reshape(10, 1), [G] * 10)
    assert m.priors[G] == pytest.approx(11 / 14)
    for g in (P, A, E):
        assert m.priors[g] == pytest.approx(1 / 14)
    assert m.priors.sum() == pytest.approx(1.0, abs=1e-12)


def test_mean_and_population_variance():
    m = fit([[1.0], [3.0]], [A, A])
    assert m.means[A, 0] == 2.0
    assert m.variances[A, 0] == 1.0


def test_constant_feature_hits_floor():
    X = [[5.0, 1.0], [5.0, 2.0], [5.0, 9.0]]
    m = fit(X, [P, P, P])
    assert m.variances[P, 0] == m.variance_floor
    global_var = np.var([1.0, 2.0, 9.0])
    assert m.variance_floor == pytest.approx(1e-9 * global_var)


def test_floor_minimum_when_everything_constant():
    m = fit([[1.0], [1.0]], [P, G])
    assert m.variance_floor == 1e-12
    assert np.all(m.variances >= 1e-12)


def test_absent_class_gets_global_parameters():
    X = np.array([[1.0], [2.0], [6.0]])
    m = fit(X, [P, P, G])
    assert m.means[E, 0] == pytest.approx(3.0)
    assert m.variances[E, 0] == pytest.approx(np.var(X))


def test_fit_errors():
    with pytest.raises(UsageError):
        fit([[1.0], [2.0]], [P])
    with pytest.raises(UsageError):
        fit(np.empty((0, 3)), [])
    with pytest.raises(DataError):
        fit([[1.0], [math.nan]], [P, G])
    with pytest.raises(DataError):
        fit([[1.0], [math.inf]], [P, G])


def test_density_peak():
    assert gaussian_logpdf(0.0, 0.0, 1.0) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-12)
    assert gaussian_logpdf(3.0, 3.0, 1.0) == pytest.approx(-0.918938533204673)


def test_identical_classes_equal_scores():
    m = NaiveBayesModel(np.full(4, 0.25), np.zeros((4, 2)), np.ones((4, 2)), 1e-12, 0)
    for x in ([0.0, 0.0], [5.0, -3.0]):
        s = m.log_posterior(x)
        assert np.all(s == s[0])
        assert m.predict(x) == P


def test_one_feature_two_class_linear_oracle():
    m = NaiveBayesModel(np.array([0.1, 0.2, 0.3, 0.4]),
                        np.array([[0.0], [1.0], [2.0], [3.0]]),
                        np.array([[1.0], [0.5], [2.0], [1.5]]), 1e-12, 0)
    for x in np.linspace(-3, 6, 19):
        lin = linear_space_posteriors(m, [x])
        assert m.posteriors([x]) == pytest.approx(lin, rel=1e-9)


def test_single_class_training_predicts_it():
    rng = np.random.default_rng(0)
    m = fit(rng.normal(size=(30, 3)), [E] * 30)
    for x in rng.normal(scale=5, size=(20, 3)):
        assert m.predict(x) == E


def test_separated_classes():
    m = NaiveBayesModel(np.full(4, 0.25),
                        np.array([[-10.0], [10.0], [100.0], [200.0]]),
                        np.ones((4, 1)), 1e-12, 0)
    assert m.predict([-10.0]) == P
    assert m.predict([10.0]) == A


def test_shift_invariance_and_prior_scaling():
    rng = np.random.default_rng(1)
    m = random_model(rng, 3)
    scaled = NaiveBayesModel(m.priors * 7.5, m.means, m.variances, m.variance_floor, 0)
    for x in rng.normal(size=(50, 3)):
        s = m.log_posterior(x)
        assert np.argmax(s + 123.4) == np.argmax(s)
        assert scaled.predict(x) == m.predict(x)


def test_duplicated_training_set():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(loc=3 * k, size=(25, 2)) for k in range(4)])
    y = [g for g in GRADES for _ in range(25)]
    a = fit(X, y)
    b = fit(np.vstack([X, X]), y + y)
    assert np.allclose(a.means, b.means)
    assert np.allclose(a.variances, b.variances)
    assert np.allclose(a.priors, b.priors)
    probe = rng.uniform(-3, 12, size=(200, 2))
    assert a.predict_batch(probe) == b.predict_batch(probe)


def test_dimension_mismatch():
    m = fit([[1.0, 2.0]], [P])
    with pytest.raises(DataError):
        m.log_posterior([1.0])


def test_serialization_roundtrip_and_determinism(tmp_path):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 16)) * 1e3
    y = [GRADES[i % 4] for i in range(40)]
    a, b = fit(X, y), fit(X, y)
    assert a.to_json() == b.to_json()
    a.save(tmp_path / "m.json")
    back = NaiveBayesModel.load(tmp_path / "m.json")
    assert np.array_equal(back.means, a.means)
    assert np.array_equal(back.variances, a.variances)
    assert np.array_equal(back.priors, a.priors)
    assert back.training_count == 40
    doc = a.to_dict()
    assert set(doc) == {"version", "class_order", "priors", "means", "variances",
                        "variance_floor", "training_count"}
    assert doc["class_order"] == ["poor", "average", "good", "excellent"]


def test_load_rejects_bad_files(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(DataError):
        NaiveBayesModel.load(p)
    with pytest.raises(DataError):
        NaiveBayesModel.load(tmp_path / "missing.json")
    doc = fit([[1.0]], [P]).to_dict()
    doc["class_order"] = list(reversed(doc["class_order"]))
    with pytest.raises(DataError):
        NaiveBayesModel.from_dict(doc)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_posteriors_sum_to_one_and_match_oracle(seed, n_features):
    rng = np.random.default_rng(seed)
    m = random_model(rng, n_features)
    for x in rng.uniform(-4, 4, size=(10, n_features)):
        post = m.posteriors(x)
        assert post.sum() == pytest.approx(1.0, abs=1e-9)
        assert post == pytest.approx(linear_space_posteriors(m, x), rel=1e-9)
