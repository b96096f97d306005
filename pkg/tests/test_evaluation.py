import random

import pytest
from hypothesis import given, strategies as st

from curalog.annotation import ActionClass
from curalog.errors import ValidationError
from curalog.evaluation import ConfusionMatrix, compare_models, confusion_matrix, metrics

A = ActionClass.QualityChecks
B = ActionClass.DataTransformation


class TestConfusionMatrix:
    def test_hand_example(self):
        cm = confusion_matrix([A, A, B], [A, B, B], classes=[A, B])
        assert cm.matrix == ((1, 1), (0, 1))

    def test_perfect_diagonal(self):
        cm = confusion_matrix([A, B, A], [A, B, A], classes=[A, B])
        assert cm.matrix == ((2, 0), (0, 1))

    def test_single_instance(self):
        cm = confusion_matrix([A], [B], classes=[A, B])
        assert sum(sum(r) for r in cm.matrix) == 1

    def test_length_mismatch_fatal(self):
        with pytest.raises(ValidationError):
            confusion_matrix([A], [A, B])

    def test_unknown_label_fatal(self):
        with pytest.raises(ValidationError, match="Communication"):
            confusion_matrix([A], [ActionClass.Communication], classes=[A, B])


class TestMetrics:
    def test_hand_example(self):
        cm = confusion_matrix([A, A, B], [A, B, B], classes=[A, B])
        report = metrics(cm)
        assert report.accuracy == pytest.approx(2 / 3)
        assert report.per_class[A].precision == pytest.approx(1.0)
        assert report.per_class[B].precision == pytest.approx(0.5)
        assert report.per_class[A].recall == pytest.approx(0.5)
        assert report.per_class[B].recall == pytest.approx(1.0)
        assert report.per_class[A].f1 == pytest.approx(2 / 3)
        assert report.per_class[B].f1 == pytest.approx(2 / 3)
        assert report.macro_f1 == pytest.approx(2 / 3)

    def test_perfect_predictions_all_one(self):
        cm = confusion_matrix([A, B], [A, B], classes=[A, B])
        report = metrics(cm)
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0
        assert report.weighted_f1 == 1.0

    def test_zero_over_zero_flagged_not_crash(self):
        # class B never predicted and never correct
        cm = ConfusionMatrix(classes=(A, B), matrix=((2, 0), (1, 0)))
        report = metrics(cm)
        # B predicted column: (0, 0) -> precision 0/0 resolved to 0 with flag
        assert report.per_class[B].precision == 0.0
        assert report.per_class[B].undefined_precision

    def test_weighted_recall_equals_accuracy(self):
        cm = confusion_matrix([A, A, B], [A, B, B], classes=[A, B])
        report = metrics(cm)
        assert report.weighted_recall == report.accuracy

    def test_weighted_recall_identity_on_random_matrices(self):
        rng = random.Random(4)
        classes = list(ActionClass)
        for _ in range(100):
            n = rng.randint(2, 8)
            cls = classes[:n]
            m = [[rng.randint(0, 9) for _ in range(n)] for _ in range(n)]
            if not any(any(row) for row in m):
                m[0][0] = 1
            # drop all-zero true rows to keep supports positive where counted
            cm = ConfusionMatrix(classes=tuple(cls), matrix=tuple(tuple(r) for r in m))
            report = metrics(cm)
            assert report.weighted_recall == pytest.approx(report.accuracy, abs=0)

    def test_class_permutation_invariance(self):
        y_true = [A, A, B, ActionClass.Other]
        y_pred = [A, B, B, ActionClass.Other]
        r1 = metrics(confusion_matrix(y_true, y_pred, classes=[A, B, ActionClass.Other]))
        r2 = metrics(confusion_matrix(y_true, y_pred, classes=[ActionClass.Other, B, A]))
        assert r1.accuracy == r2.accuracy
        assert r1.macro_f1 == pytest.approx(r2.macro_f1)
        assert r1.per_class[A] == r2.per_class[A]

    def test_all_off_diagonal_macro_f1_zero(self):
        cm = ConfusionMatrix(classes=(A, B), matrix=((0, 3), (2, 0)))
        assert metrics(cm).macro_f1 == 0.0


class TestCompare:
    def _report(self, name, correct, total=100):
        y_true = [A] * total
        y_pred = [A] * correct + [B] * (total - correct)
        cm = confusion_matrix(y_true, y_pred, classes=[A, B])
        return metrics(cm, model_name=name, test_fingerprint="t1")

    def test_ordering_marked(self):
        table = compare_models(
            [self._report("baseline", 15), self._report("sgd", 73), self._report("cnb", 75)]
        )
        lines = table.splitlines()
        assert "baseline" in lines[2] and "cnb" in lines[4]
        cnb_line = next(ln for ln in lines if ln.startswith("cnb"))
        assert "0.75*" in cnb_line

    def test_single_report(self):
        table = compare_models([self._report("only", 50)])
        assert len(table.splitlines()) == 3

    def test_identical_reports_tie_marking(self):
        table = compare_models([self._report("m1", 60), self._report("m2", 60)])
        for line in table.splitlines()[2:]:
            assert line.count("*") == 4

    def test_mismatched_fingerprints_fatal(self):
        r1 = self._report("m1", 60)
        r2 = metrics(
            confusion_matrix([A], [A], classes=[A, B]), model_name="m2", test_fingerprint="t2"
        )
        with pytest.raises(ValidationError):
            compare_models([r1, r2])

    def test_empty_fatal(self):
        with pytest.raises(ValidationError):
            compare_models([])


@given(
    st.lists(
        st.tuples(st.sampled_from(list(ActionClass)[:4]), st.sampled_from(list(ActionClass)[:4])),
        min_size=1,
        max_size=60,
    )
)
def test_weighted_recall_accuracy_property(pairs):
    y_true = [t for t, _ in pairs]
    y_pred = [p for _, p in pairs]
    report = metrics(confusion_matrix(y_true, y_pred, classes=list(ActionClass)[:4]))
    assert report.weighted_recall == pytest.approx(report.accuracy, abs=1e-12)
