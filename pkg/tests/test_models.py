import io
import random

import numpy as np
import pytest

from curalog.annotation import ActionClass
from curalog.errors import FeatureSpaceMismatch, ModelFormatError, ValidationError
from curalog.features import DocTermMatrix
from curalog.models import (
    ComplementNaiveBayes,
    LinearSGDClassifier,
    StratifiedDummyClassifier,
    load_model,
    save_model,
)
from oracle import cnb_oracle, cnb_oracle_predict

A = ActionClass.QualityChecks
B = ActionClass.DataTransformation
C = ActionClass.Communication


def matrix_from_dense(dense) -> DocTermMatrix:
    rows = []
    zero = []
    for d, row in enumerate(dense):
        cells = tuple((i, float(v)) for i, v in enumerate(row) if v)
        if not cells:
            zero.append(d)
        rows.append(cells)
    return DocTermMatrix(
        rows=tuple(rows),
        n_docs=len(dense),
        n_terms=len(dense[0]) if dense else 0,
        weighting="counts",
        zero_rows=tuple(zero),
    )


class TestDummy:
    def test_degenerate_distribution(self):
        model = StratifiedDummyClassifier(seed=1).fit(None, [A] * 20)
        assert model.predict(5) == [A] * 5

    def test_seeded_replay(self):
        y = [A] * 10 + [B] * 10
        m1 = StratifiedDummyClassifier(seed=42).fit(None, y)
        m2 = StratifiedDummyClassifier(seed=42).fit(None, y)
        assert m1.predict(50) == m2.predict(50)

    def test_accuracy_close_to_sum_p_squared(self):
        # skewed 8-class distribution; expected accuracy = sum p_c^2
        probs = [0.30, 0.18, 0.12, 0.12, 0.10, 0.08, 0.06, 0.04]
        classes = list(ActionClass)
        rng = random.Random(0)
        y_train = rng.choices(classes, weights=probs, k=4000)
        y_test = rng.choices(classes, weights=probs, k=6000)
        model = StratifiedDummyClassifier(seed=9).fit(None, y_train)
        preds = model.predict(len(y_test))
        accuracy = sum(p == t for p, t in zip(preds, y_test)) / len(y_test)
        expected = sum(p * p for p in probs)
        assert accuracy == pytest.approx(expected, abs=0.03)

    def test_empty_fatal(self):
        with pytest.raises(ValidationError):
            StratifiedDummyClassifier().fit(None, [])


class TestCNB:
    def test_disjoint_vocab_two_class(self):
        # docs: {a}, {b}; a fresh doc containing only "a" must go to class A
        X = matrix_from_dense([[1, 0], [0, 1]])
        model = ComplementNaiveBayes().fit(X, [A, B])
        oracle_w = cnb_oracle([[1, 0], [0, 1]], [A, B], model.classes_)
        assert np.allclose(model.weights_, oracle_w, atol=1e-9)
        fresh = matrix_from_dense([[1, 0]])
        assert model.predict(fresh) == [cnb_oracle_predict(oracle_w, [1, 0], model.classes_)]
        assert model.predict(fresh) == [A]

    def test_zero_vector_ties_to_earliest_class(self):
        X = matrix_from_dense([[1, 0], [0, 1]])
        model = ComplementNaiveBayes().fit(X, [A, B])
        scores = model.predict_scores(matrix_from_dense([[0, 0]]))
        assert scores[0] == [0.0, 0.0]
        assert model.predict(matrix_from_dense([[0, 0]])) == [model.classes_[0]]

    def test_three_class_fixture_matches_oracle(self):
        dense = [
            [2, 0, 1, 0],
            [1, 1, 0, 0],
            [0, 2, 0, 1],
            [0, 1, 1, 0],
            [1, 0, 0, 2],
            [0, 0, 2, 1],
        ]
        y = [A, A, B, B, C, C]
        model = ComplementNaiveBayes(alpha=1.0, normalize=True).fit(matrix_from_dense(dense), y)
        oracle_w = cnb_oracle(dense, y, model.classes_, alpha=1.0, normalize=True)
        assert np.allclose(model.weights_, oracle_w, atol=1e-9)
        for row in dense:
            got = model.predict(matrix_from_dense([row]))[0]
            assert got == cnb_oracle_predict(oracle_w, row, model.classes_)

    def test_normalized_weights_l1_unit(self):
        dense = [[1, 2, 0], [0, 1, 1], [2, 0, 1]]
        model = ComplementNaiveBayes().fit(matrix_from_dense(dense), [A, B, C])
        for row in model.weights_:
            assert np.abs(row).sum() == pytest.approx(1.0, abs=1e-9)

    def test_randomized_oracle_equivalence(self):
        rng = random.Random(77)
        classes_pool = list(ActionClass)[:4]
        for _ in range(25):
            n_docs = rng.randint(2, 10)
            n_terms = rng.randint(2, 20)
            n_classes = rng.randint(2, 4)
            while True:
                y = [classes_pool[rng.randrange(n_classes)] for _ in range(n_docs)]
                if len(set(y)) >= 2:
                    break
            dense = [[rng.randint(0, 3) for _ in range(n_terms)] for _ in range(n_docs)]
            model = ComplementNaiveBayes().fit(matrix_from_dense(dense), y)
            oracle_w = cnb_oracle(dense, y, model.classes_)
            assert np.allclose(model.weights_, oracle_w, atol=1e-9)
            for row in dense:
                assert model.predict(matrix_from_dense([row]))[0] == cnb_oracle_predict(
                    oracle_w, row, model.classes_
                )

    def test_single_class_fatal(self):
        with pytest.raises(ValidationError, match="complement undefined"):
            ComplementNaiveBayes().fit(matrix_from_dense([[1], [1]]), [A, A])

    def test_unsmoothed_zero_fatal(self):
        X = matrix_from_dense([[1, 0], [0, 1]])
        with pytest.raises(ValidationError, match="unsmoothed zero"):
            ComplementNaiveBayes(alpha=0.0).fit(X, [A, B])


def separable_fixture():
    # class-exclusive vocabularies: terms 0-2 only in A docs, 3-5 only in B
    dense = [
        [1, 1, 0, 0, 0, 0],
        [0, 1, 1, 0, 0, 0],
        [1, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 1, 0],
        [0, 0, 0, 0, 1, 1],
        [0, 0, 0, 1, 0, 1],
    ]
    return matrix_from_dense(dense), [A, A, A, B, B, B]


class TestSGD:
    def test_separable_reaches_training_accuracy_one(self):
        X, y = separable_fixture()
        model = LinearSGDClassifier(seed=3).fit(X, y)
        assert model.predict(X) == y

    def test_seed_determinism(self):
        X, y = separable_fixture()
        m1 = LinearSGDClassifier(seed=3).fit(X, y)
        m2 = LinearSGDClassifier(seed=3).fit(X, y)
        assert np.array_equal(m1.weights_, m2.weights_)
        assert np.array_equal(m1.biases_, m2.biases_)
        m3 = LinearSGDClassifier(seed=4).fit(X, y)
        assert m3.predict(X) == y  # different shuffle, same separable predictions

    def test_zero_vector_predicts_argmax_bias(self):
        X, y = separable_fixture()
        model = LinearSGDClassifier(seed=3).fit(X, y)
        zero = matrix_from_dense([[0, 0, 0, 0, 0, 0]])
        scores = model.predict_scores(zero)[0]
        assert scores == pytest.approx(list(model.biases_))
        assert model.predict(zero)[0] == model.classes_[int(np.argmax(model.biases_))]

    def test_norm_non_increasing_once_margins_satisfied(self):
        # large-magnitude one-hot features: margins satisfied after epoch 1,
        # later epochs only apply L2 decay
        dense = [[10.0, 0.0], [0.0, 10.0]]
        model = LinearSGDClassifier(l2_lambda=1e-2, epochs=8, seed=0).fit(
            matrix_from_dense(dense), [A, B]
        )
        history = model.weight_norm_history_
        assert all(b <= a + 1e-12 for a, b in zip(history[1:], history[2:]))

    def test_single_class_fatal(self):
        with pytest.raises(ValidationError):
            LinearSGDClassifier().fit(matrix_from_dense([[1], [1]]), [A, A])


class TestPredictContract:
    def test_fingerprint_mismatch_fatal(self):
        X, y = separable_fixture()
        model = ComplementNaiveBayes().fit(X, y, fingerprint="abc")
        with pytest.raises(FeatureSpaceMismatch):
            model.predict(X, fingerprint="def")

    def test_empty_matrix_empty_outputs(self):
        X, y = separable_fixture()
        model = ComplementNaiveBayes().fit(X, y)
        empty = DocTermMatrix(rows=(), n_docs=0, n_terms=6, weighting="counts")
        assert model.predict(empty) == []
        assert model.predict_scores(empty) == []

    def test_supervised_beats_dummy_on_separable(self):
        X, y = separable_fixture()
        cnb = ComplementNaiveBayes().fit(X, y)
        sgd = LinearSGDClassifier(seed=1).fit(X, y)
        dummy = StratifiedDummyClassifier(seed=1).fit(None, y)
        acc = lambda preds: sum(p == t for p, t in zip(preds, y)) / len(y)
        assert acc(cnb.predict(X)) == 1.0
        assert acc(sgd.predict(X)) == 1.0
        assert acc(cnb.predict(X)) > acc(dummy.predict(len(y)))


class TestPersistence:
    def roundtrip(self, model):
        buf = io.StringIO()
        save_model(model, buf)
        return load_model(io.StringIO(buf.getvalue()))

    def test_cnb_roundtrip_identical_predictions(self):
        X, y = separable_fixture()
        model = ComplementNaiveBayes().fit(X, y, fingerprint="fp")
        again = self.roundtrip(model)
        assert again.predict(X, fingerprint="fp") == model.predict(X, fingerprint="fp")
        assert again.predict_scores(X) == model.predict_scores(X)

    def test_sgd_roundtrip(self):
        X, y = separable_fixture()
        model = LinearSGDClassifier(seed=2).fit(X, y)
        again = self.roundtrip(model)
        assert again.predict(X) == model.predict(X)

    def test_dummy_roundtrip_replays_stream(self):
        model = StratifiedDummyClassifier(seed=5).fit(None, [A] * 5 + [B] * 5)
        again = self.roundtrip(model)
        model.reset_rng()
        assert again.predict(20) == model.predict(20)

    def test_corrupted_file_fatal(self):
        with pytest.raises(ModelFormatError):
            load_model(io.StringIO('{"version": "curalog-model/1", "variant"'))

    def test_unknown_variant_fatal(self):
        with pytest.raises(ModelFormatError, match="unsupported variant"):
            load_model(io.StringIO('{"version": "curalog-model/1", "variant": "transformer"}'))

    def test_version_mismatch_fatal(self):
        with pytest.raises(ModelFormatError, match="version"):
            load_model(io.StringIO('{"version": "curalog-model/999", "variant": "cnb"}'))
