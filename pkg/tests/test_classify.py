"""
Tests for the classifiers, cross-validation and grid search.
"""

import math

import numpy as np
import pytest
from scipy import sparse

from tokbench.components.classify import (
    LrClassifier,
    LrModel,
    MnbClassifier,
    evaluate_error,
    grid_search,
    label_array,
    load_classifier,
    lr_fit,
    lr_objective_gradient,
    lr_predict,
    mnb_fit,
    mnb_predict,
    parse_grid,
    repeated_stratified_kfold,
)
from tokbench.components.corpus import Sentiment
from tokbench.components.registry import get_classifier_factory
from tokbench.utils import ConfigError, ModelFormatError, ValidationError

# columns a, b, c; row 0 positive, row 1 negative
COUNTS = sparse.csr_matrix(np.array([[2.0, 1.0, 0.0], [0.0, 1.0, 1.0]]))
COUNT_LABELS = np.array([1, 0])

SEPARABLE_X = sparse.csr_matrix(np.array([[1.0, 0.5], [2.0, -1.0], [-1.0, 0.3], [-2.0, -0.5]]))
SEPARABLE_Y = np.array([1, 1, 0, 0])


def _random_problem(seed: int, n: int = 60, v: int = 20):
    rng = np.random.default_rng(seed)
    X = sparse.random(n, v, density=0.3, format="csr", random_state=seed)
    scores = X @ rng.normal(size=v)
    y = (scores > np.median(scores)).astype(np.int64)
    return X, y


def _symmetric_problem():
    # feature 0 marks positives, feature 1 negatives; the optimum has b = 0 for every C
    rows = [[1.0, 0.0]] * 8 + [[0.0, 1.0]] * 8
    return sparse.csr_matrix(np.array(rows)), np.array([1] * 8 + [0] * 8)


class TestMultinomialNaiveBayes:
    """Tests for mnb_fit / mnb_predict."""

    def test_fit_golden(self):
        model = mnb_fit(COUNTS, COUNT_LABELS, alpha=1.0)
        theta = np.exp(model.feature_log_prob)
        assert theta[1] == pytest.approx([0.5, 1 / 3, 1 / 6], abs=1e-12)
        assert theta[0] == pytest.approx([0.2, 0.4, 0.4], abs=1e-12)
        assert np.exp(model.class_log_prior) == pytest.approx([0.5, 0.5])
        assert theta.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_predict_golden(self):
        model = mnb_fit(COUNTS, COUNT_LABELS)
        labels, posteriors = mnb_predict(model, sparse.csr_matrix([[1.0, 0.0, 0.0], [0, 0, 2.0]]))
        assert labels.tolist() == [1, 0]
        assert posteriors[0] == pytest.approx([2 / 7, 5 / 7], abs=1e-12)
        assert posteriors.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-12)

    def test_empty_row_uses_priors(self):
        X = sparse.csr_matrix([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        model = mnb_fit(X, np.array([1, 1, 0]))
        labels, _ = mnb_predict(model, sparse.csr_matrix((1, 2)))
        assert labels.tolist() == [1]

    def test_zero_class_is_uniform(self):
        X = sparse.csr_matrix([[0.0, 0.0, 0.0], [1.0, 2.0, 0.5]])
        model = mnb_fit(X, np.array([0, 1]))
        assert np.exp(model.feature_log_prob[0]) == pytest.approx([1 / 3] * 3)

    def test_closed_form_scores(self):
        rng = np.random.default_rng(0)
        counts = rng.integers(0, 4, size=(12, 5)).astype(float)
        y = np.array([0, 1] * 6)
        model = mnb_fit(sparse.csr_matrix(counts), y, alpha=0.5)
        doc = counts[0]
        _, posteriors = mnb_predict(model, sparse.csr_matrix(doc))
        joint = []
        for c in (0, 1):
            fc = counts[y == c].sum(axis=0) + 0.5
            theta = fc / fc.sum()
            joint.append(0.5 * np.prod(theta**doc))
        assert posteriors[0] == pytest.approx(np.array(joint) / sum(joint), rel=1e-9)

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ValidationError):
            mnb_fit(COUNTS, COUNT_LABELS, alpha=alpha)

    def test_single_class(self):
        with pytest.raises(ValidationError):
            mnb_fit(COUNTS, np.array([1, 1]))

    def test_column_mismatch(self):
        model = mnb_fit(COUNTS, COUNT_LABELS)
        with pytest.raises(ValidationError):
            mnb_predict(model, sparse.csr_matrix((1, 4)))

    def test_save_load(self, temp_dir):
        classifier = MnbClassifier(mnb_fit(COUNTS, COUNT_LABELS, alpha=0.3))
        loaded = load_classifier(classifier.save(temp_dir / "mnb.tsv"))
        assert isinstance(loaded, MnbClassifier)
        assert loaded.model.alpha == 0.3
        assert np.array_equal(loaded.model.feature_log_prob, classifier.model.feature_log_prob)
        assert np.array_equal(loaded.model.class_log_prior, classifier.model.class_log_prior)


class TestLogisticObjective:
    """Tests for lr_objective_gradient."""

    def test_zero_model_objective(self):
        X, y = _random_problem(1, n=17)
        objective, _ = lr_objective_gradient(np.zeros(20), 0.0, X, np.where(y == 1, 1.0, -1.0), 3)
        assert objective == pytest.approx(3 * 17 * math.log(2), rel=1e-12)

    def test_single_sample_gradient(self):
        X = sparse.csr_matrix([[1.0, 0.0]])
        _, grad = lr_objective_gradient(np.zeros(2), 0.0, X, np.array([1.0]), 1.0)
        assert grad == pytest.approx([-0.5, 0.0, -0.5])

    def test_finite_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(100):
            n, v = rng.integers(2, 8), rng.integers(1, 6)
            X = sparse.csr_matrix(rng.normal(size=(n, v)))
            y = rng.choice([-1.0, 1.0], size=n)
            C = float(rng.uniform(0.1, 5.0))
            theta = rng.normal(size=v + 1)

            def objective(t):
                return lr_objective_gradient(t[:-1], t[-1], X, y, C)[0]

            _, grad = lr_objective_gradient(theta[:-1], theta[-1], X, y, C)
            numeric = np.array(
                [
                    (objective(theta + h * e) - objective(theta - h * e)) / (2 * h)
                    for e in np.eye(v + 1)
                ]
            )
            assert np.linalg.norm(numeric - grad) <= 1e-5 * max(1.0, np.linalg.norm(grad))


class TestLogisticFit:
    """Tests for lr_fit / lr_predict."""

    def test_separable_toy(self):
        model = lr_fit(SEPARABLE_X, SEPARABLE_Y, C=10.0)
        labels, _ = lr_predict(model, SEPARABLE_X)
        assert evaluate_error(labels, SEPARABLE_Y) == 0.0
        assert np.all(np.isfinite(model.weights))

    def test_objective_trace_non_increasing(self):
        X, y = _random_problem(2)
        model = lr_fit(X, y, C=10.0)
        trace = model.objective_trace
        assert len(trace) >= 2
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_converges_below_tol(self):
        X, y = _random_problem(3)
        model = lr_fit(X, y, C=1.0, tol=1e-6)
        assert model.converged
        assert model.grad_norm <= 1e-6

    @pytest.mark.parametrize("C", [1.0, 10.0, 100.0])
    def test_converged_flag_matches_gradient(self, C):
        X, y = _random_problem(7)
        model = lr_fit(X, y, C=C, tol=1e-6)
        assert model.converged == (model.grad_norm <= 1e-6)

    def test_optimum_beats_perturbations(self):
        X, y = _random_problem(4, n=30, v=6)
        signs = np.where(y == 1, 1.0, -1.0)
        model = lr_fit(X, y, C=2.0)
        best, _ = lr_objective_gradient(model.weights, model.bias, X, signs, 2.0)
        rng = np.random.default_rng(4)
        for _ in range(1000):
            delta = rng.normal(scale=0.1, size=7)
            perturbed, _ = lr_objective_gradient(
                model.weights + delta[:-1], model.bias + delta[-1], X, signs, 2.0
            )
            assert best <= perturbed + 1e-9

    def test_tiny_c_shrinks_weights(self):
        X, y = _random_problem(5)
        model = lr_fit(X, y, C=1e-8)
        assert np.linalg.norm(model.weights) < 1e-3

    def test_max_iter_flags_non_convergence(self):
        X, y = _random_problem(6)
        model = lr_fit(X, y, C=100.0, max_iter=1)
        assert not model.converged
        assert model.grad_norm > 1e-6
        assert model.n_iter <= 1

    def test_single_class(self):
        with pytest.raises(ValidationError):
            lr_fit(SEPARABLE_X, np.array([1, 1, 1, 1]))

    def test_zero_model_predicts_positive(self):
        model = LrModel(np.zeros(3), 0.0, C=1.0)
        labels, probabilities = lr_predict(model, sparse.csr_matrix(np.eye(3)))
        assert probabilities.tolist() == [0.5, 0.5, 0.5]
        assert labels.tolist() == [1, 1, 1]

    def test_saturated_bias(self):
        model = LrModel(np.zeros(2), 100.0, C=1.0)
        _, probabilities = lr_predict(model, sparse.csr_matrix((1, 2)))
        assert probabilities[0] == pytest.approx(1.0)

    def test_column_mismatch(self):
        with pytest.raises(ValidationError):
            lr_predict(LrModel(np.zeros(2), 0.0, C=1.0), sparse.csr_matrix((1, 3)))

    def test_save_load_bit_exact(self, temp_dir):
        X, y = _random_problem(7)
        classifier = LrClassifier(lr_fit(X, y, C=10.0))
        path = classifier.save(temp_dir / "lr.tsv")
        assert path.read_text(encoding="utf-8").startswith("#lr v1 C=10 n_features=20")
        loaded = load_classifier(path)
        assert isinstance(loaded, LrClassifier)
        assert np.array_equal(loaded.model.weights, classifier.model.weights)
        assert loaded.model.converged == classifier.model.converged
        assert loaded.model.n_iter == classifier.model.n_iter
        assert loaded.model.bias == classifier.model.bias
        assert loaded.predict(X).tolist() == classifier.predict(X).tolist()

    def test_unknown_model_header(self, temp_dir):
        path = temp_dir / "model.tsv"
        path.write_text("#svm v1\n", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_classifier(path)


class TestRegisteredClassifiers:
    """Tests for the classifier registry."""

    def test_defaults_from_config(self):
        mnb = get_classifier_factory("mnb")(COUNTS, COUNT_LABELS)
        assert mnb.model.alpha == 1.0
        lr = get_classifier_factory("lr")(SEPARABLE_X, SEPARABLE_Y)
        assert lr.model.C == 10.0

    def test_unknown_classifier(self):
        with pytest.raises(ConfigError):
            get_classifier_factory("svm")

    def test_label_array(self):
        assert label_array([Sentiment.NEGATIVE, Sentiment.POSITIVE, 1]).tolist() == [0, 1, 1]
        with pytest.raises(ValidationError):
            label_array([2])


class TestCrossValidation:
    """Tests for repeated_stratified_kfold."""

    def test_two_by_two(self):
        y = np.array([1, 1, 0, 0])
        plan = repeated_stratified_kfold(y, k=2, repeats=1, seed=0)
        for _, _, _, valid in plan.splits():
            assert sorted(y[valid].tolist()) == [0, 1]

    def test_proportional_folds(self):
        y = np.array([1] * 7 + [0] * 3)
        plan = repeated_stratified_kfold(y, k=3, repeats=2, seed=1)
        for _, _, _, valid in plan.splits():
            assert int((y[valid] == 1).sum()) in (2, 3)
            assert int((y[valid] == 0).sum()) == 1

    def test_class_smaller_than_k(self):
        y = np.array([1] * 7 + [0] * 3)
        with pytest.raises(ValidationError):
            repeated_stratified_kfold(y, k=5, repeats=1, seed=0)

    def test_small_class_allowed(self):
        y = np.array([1] * 7 + [0] * 3)
        plan = repeated_stratified_kfold(y, k=5, repeats=2, seed=0, allow_small_classes=True)
        for _, _, _, valid in plan.splits():
            assert int((y[valid] == 1).sum()) in (1, 2)
            assert int((y[valid] == 0).sum()) in (0, 1)
        for repeat in plan.folds:
            assert sorted(np.concatenate(repeat).tolist()) == list(range(10))

    def test_partition(self):
        rng = np.random.default_rng(9)
        y = rng.integers(0, 2, size=53)
        plan = repeated_stratified_kfold(y, k=5, repeats=3, seed=9)
        assert len(plan) == 15
        for repeat in plan.folds:
            joined = np.concatenate(repeat)
            assert sorted(joined.tolist()) == list(range(53))
        for _, _, train, valid in plan.splits():
            assert np.intersect1d(train, valid).size == 0
            assert train.size + valid.size == 53

    def test_deterministic(self):
        y = np.array([0, 1] * 20)
        a = repeated_stratified_kfold(y, 4, 2, seed=42)
        b = repeated_stratified_kfold(y, 4, 2, seed=42)
        c = repeated_stratified_kfold(y, 4, 2, seed=43)
        assert all(np.array_equal(f, g) for r, s in zip(a.folds, b.folds) for f, g in zip(r, s))
        assert any(
            not np.array_equal(f, g) for r, s in zip(a.folds, c.folds) for f, g in zip(r, s)
        )

    def test_repeats_reshuffle(self):
        y = np.array([0, 1] * 20)
        plan = repeated_stratified_kfold(y, 4, 2, seed=5)
        assert any(not np.array_equal(f, g) for f, g in zip(plan.folds[0], plan.folds[1]))

    @pytest.mark.parametrize("k, repeats", [(1, 1), (2, 0)])
    def test_bad_arguments(self, k, repeats):
        with pytest.raises(ValidationError):
            repeated_stratified_kfold(np.array([0, 1, 0, 1]), k, repeats, seed=0)


class TestGridSearch:
    """Tests for parse_grid and grid_search."""

    def test_parse_grid(self):
        assert parse_grid("C=0.01,0.1,1") == [{"C": 0.01}, {"C": 0.1}, {"C": 1.0}]

    @pytest.mark.parametrize("text", ["alpha=1", "C=", "C=x", "C=0,1", "0.1,1"])
    def test_parse_grid_errors(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)

    def test_singleton(self):
        X, y = _random_problem(8)
        plan = repeated_stratified_kfold(y, 3, 1, seed=0)
        result = grid_search(X, y, [{"C": 5.0}], plan)
        assert result.best_params == {"C": 5.0}
        assert result.model.C == 5.0
        assert len(result.cells) == 1

    def test_tie_goes_to_smaller_c(self):
        X, y = _symmetric_problem()
        plan = repeated_stratified_kfold(y, 2, 1, seed=0)
        result = grid_search(X, y, [{"C": 1.0}, {"C": 0.1}], plan)
        assert [cell.mean_error for cell in result.cells] == [0.0, 0.0]
        assert result.best_params == {"C": 0.1}

    def test_mean_bookkeeping(self):
        X, y = _random_problem(9)
        plan = repeated_stratified_kfold(y, 3, 2, seed=1)
        result = grid_search(X, y, parse_grid("C=0.1,10"), plan)
        for cell in result.cells:
            assert len(cell.fold_errors) == 6
            assert cell.mean_error == pytest.approx(np.mean(cell.fold_errors), abs=1e-12)
        assert result.best.mean_error == min(c.mean_error for c in result.cells)
        assert result.to_dict()["best_params"] == result.best_params

    def test_jobs_do_not_change_outcome(self):
        X, y = _random_problem(10)
        plan = repeated_stratified_kfold(y, 3, 2, seed=2)
        serial = grid_search(X, y, parse_grid("C=0.1,1,10"), plan, jobs=1)
        threaded = grid_search(X, y, parse_grid("C=0.1,1,10"), plan, jobs=4)
        assert serial.to_dict() == threaded.to_dict()
        assert np.array_equal(serial.model.weights, threaded.model.weights)

    def test_empty_grid(self):
        X, y = _random_problem(11)
        with pytest.raises(ValidationError):
            grid_search(X, y, [], repeated_stratified_kfold(y, 2, 1, seed=0))

    def test_plan_size_mismatch(self):
        X, y = _random_problem(12)
        plan = repeated_stratified_kfold(np.array([0, 1] * 5), 2, 1, seed=0)
        with pytest.raises(ValidationError):
            grid_search(X, y, [{"C": 1.0}], plan)


class TestEvaluateError:
    """Tests for evaluate_error."""

    def test_identical(self):
        assert evaluate_error([0, 1, 1], [0, 1, 1]) == 0.0

    def test_one_of_four(self):
        assert evaluate_error([1, 1, 0, 0], [1, 1, 0, 1]) == 25.0

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            evaluate_error([1], [1, 0])

    def test_empty(self):
        with pytest.raises(ValidationError):
            evaluate_error([], [])
