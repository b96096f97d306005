"""Three classifiers behind one estimator-style contract:

* StratifiedDummyClassifier — feature-blind baseline sampling from the
  training class distribution,
* ComplementNaiveBayes — complement-count Naive Bayes with weight
  normalization, suited to imbalanced short-text classes,
* LinearSGDClassifier — one-vs-rest hinge-loss linear model trained by
  per-example stochastic gradient descent.

All expose fit / predict / predict_scores / get_params and serialize to a
self-describing JSON container via save_model / load_model.
"""

from __future__ import annotations

import json
import math
import random

import numpy as np

from .annotation import ActionClass
from .errors import FeatureSpaceMismatch, ModelFormatError, ValidationError
from .features import DocTermMatrix

__all__ = [
    "StratifiedDummyClassifier",
    "ComplementNaiveBayes",
    "LinearSGDClassifier",
    "save_model",
    "load_model",
    "MODEL_FORMAT_VERSION",
]

MODEL_FORMAT_VERSION = "curalog-model/1"


def _ordered_classes(y: list[ActionClass]) -> list[ActionClass]:
    present = set(y)
    return [c for c in ActionClass if c in present]


def _majority_class(y: list[ActionClass], classes: list[ActionClass]) -> ActionClass:
    counts = {c: 0 for c in classes}
    for label in y:
        counts[label] += 1
    return max(classes, key=lambda c: (counts[c], -classes.index(c)))


class _BaseClassifier:
    variant = "base"

    def __init__(self):
        self.classes_: list[ActionClass] | None = None
        self.fingerprint_: str | None = None
        self.majority_class_: ActionClass | None = None
        self.n_train_: int = 0
        self.trained_at_: str | None = None

    def get_params(self) -> dict:
        return {}

    def set_params(self, **params):
        for key, value in params.items():
            if not hasattr(self, key):
                raise ValidationError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def _check_fitted(self):
        if self.classes_ is None:
            raise ValidationError(f"{type(self).__name__} is not fitted")

    def _check_fingerprint(self, fingerprint: str | None):
        if (
            self.fingerprint_ is not None
            and fingerprint is not None
            and fingerprint != self.fingerprint_
        ):
            raise FeatureSpaceMismatch(self.fingerprint_, fingerprint)

    def predict(self, X: DocTermMatrix, fingerprint: str | None = None) -> list[ActionClass]:
        raise NotImplementedError

    def predict_scores(self, X: DocTermMatrix, fingerprint: str | None = None):
        raise NotImplementedError


class StratifiedDummyClassifier(_BaseClassifier):
    """Ignores features entirely; predicts by sampling the empirical training
    class distribution with a seeded generator.  Expected accuracy on a test
    set with the same distribution is sum(p_c^2)."""

    variant = "dummy"

    def __init__(self, seed: int = 0):
        super().__init__()
        self.seed = seed
        self.class_probs_: list[float] | None = None
        self._rng = random.Random(seed)

    def get_params(self) -> dict:
        return {"seed": self.seed}

    def fit(self, X, y: list[ActionClass], fingerprint: str | None = None):
        if not y:
            raise ValidationError("cannot fit on zero labels")
        self.classes_ = _ordered_classes(y)
        counts = {c: 0 for c in self.classes_}
        for label in y:
            counts[label] += 1
        self.class_probs_ = [counts[c] / len(y) for c in self.classes_]
        self.majority_class_ = _majority_class(y, self.classes_)
        self.fingerprint_ = fingerprint
        self.n_train_ = len(y)
        self._rng = random.Random(self.seed)
        return self

    def reset_rng(self):
        """Restart the prediction stream so identical inputs replay."""
        self._rng = random.Random(self.seed)

    def predict(self, X, fingerprint: str | None = None) -> list[ActionClass]:
        self._check_fitted()
        n = X.n_docs if isinstance(X, DocTermMatrix) else int(X)
        return [
            self._rng.choices(self.classes_, weights=self.class_probs_)[0] for _ in range(n)
        ]

    def predict_scores(self, X, fingerprint: str | None = None):
        self._check_fitted()
        n = X.n_docs if isinstance(X, DocTermMatrix) else int(X)
        return [list(self.class_probs_) for _ in range(n)]


class ComplementNaiveBayes(_BaseClassifier):
    """Weights from complement counts: for class c and term i,
    theta = (alpha + N_complement) / (alpha * |V| + sum_i N_complement),
    w = ln(theta), optionally L1-normalized per class.  Prediction is the
    argmin over classes of the weighted feature sum; ties go to the earliest
    class in class-list order."""

    variant = "cnb"

    def __init__(self, alpha: float = 1.0, normalize: bool = True):
        super().__init__()
        if alpha < 0:
            raise ValidationError("alpha must be >= 0")
        self.alpha = alpha
        self.normalize = normalize
        self.weights_: np.ndarray | None = None  # shape (n_classes, n_terms)

    def get_params(self) -> dict:
        return {"alpha": self.alpha, "normalize": self.normalize}

    def fit(self, X: DocTermMatrix, y: list[ActionClass], fingerprint: str | None = None):
        if X.n_docs != len(y):
            raise ValidationError(f"X has {X.n_docs} rows but y has {len(y)} labels")
        classes = _ordered_classes(y)
        if len(classes) < 2:
            raise ValidationError("complement undefined: need at least 2 classes")
        dense = X.to_dense()
        n_terms = X.n_terms
        total = dense.sum(axis=0)
        weights = np.zeros((len(classes), n_terms))
        for ci, cls in enumerate(classes):
            in_class = np.array([label == cls for label in y])
            comp_counts = total - dense[in_class].sum(axis=0)
            if self.alpha == 0 and np.any(comp_counts == 0):
                raise ValidationError("unsmoothed zero: alpha=0 with a zero complement count")
            denom = self.alpha * n_terms + comp_counts.sum()
            theta = (self.alpha + comp_counts) / denom
            w = np.log(theta)
            if self.normalize:
                w = w / np.abs(w).sum()
            weights[ci] = w
        self.classes_ = classes
        self.weights_ = weights
        self.majority_class_ = _majority_class(y, classes)
        self.fingerprint_ = fingerprint
        self.n_train_ = len(y)
        return self

    def predict_scores(self, X: DocTermMatrix, fingerprint: str | None = None):
        self._check_fitted()
        self._check_fingerprint(fingerprint)
        if X.n_terms != self.weights_.shape[1]:
            raise FeatureSpaceMismatch(
                f"{self.weights_.shape[1]} terms", f"{X.n_terms} terms"
            )
        scores = X.to_dense() @ self.weights_.T
        return [list(row) for row in scores]

    def predict(self, X: DocTermMatrix, fingerprint: str | None = None) -> list[ActionClass]:
        scores = self.predict_scores(X, fingerprint)
        return [self.classes_[_argmin(row)] for row in scores]


class LinearSGDClassifier(_BaseClassifier):
    """One-vs-rest linear classifiers trained with hinge loss and L2 decay.

    Each epoch shuffles the training examples (seeded); every example updates
    all per-class classifiers with learning rate
    eta_t = eta0 / (1 + eta0 * l2_lambda * t), t counting examples globally.
    Prediction is the argmax of w_c . x + b_c; ties go to the earliest class.
    """

    variant = "sgd"

    def __init__(
        self,
        l2_lambda: float = 1e-4,
        epochs: int = 10,
        eta0: float = 0.1,
        seed: int = 0,
    ):
        super().__init__()
        self.l2_lambda = l2_lambda
        self.epochs = epochs
        self.eta0 = eta0
        self.seed = seed
        self.weights_: np.ndarray | None = None  # (n_classes, n_terms)
        self.biases_: np.ndarray | None = None

    def get_params(self) -> dict:
        return {
            "l2_lambda": self.l2_lambda,
            "epochs": self.epochs,
            "eta0": self.eta0,
            "seed": self.seed,
        }

    def fit(self, X: DocTermMatrix, y: list[ActionClass], fingerprint: str | None = None):
        if X.n_docs != len(y):
            raise ValidationError(f"X has {X.n_docs} rows but y has {len(y)} labels")
        classes = _ordered_classes(y)
        if len(classes) < 2:
            raise ValidationError("need at least 2 classes")
        dense = X.to_dense()
        n_terms = X.n_terms
        targets = np.array(
            [[1.0 if label == cls else -1.0 for cls in classes] for label in y]
        )
        w = np.zeros((len(classes), n_terms))
        b = np.zeros(len(classes))
        rng = random.Random(self.seed)
        t = 0
        order = list(range(X.n_docs))
        self.weight_norm_history_ = []
        for epoch in range(self.epochs):
            rng.shuffle(order)
            for idx in order:
                eta = self.eta0 / (1.0 + self.eta0 * self.l2_lambda * t)
                x = dense[idx]
                margins = targets[idx] * (w @ x + b)
                decay = 1.0 - eta * self.l2_lambda
                w *= decay
                hinge = margins < 1.0
                if hinge.any():
                    w[hinge] += eta * targets[idx][hinge, None] * x[None, :]
                    b[hinge] += eta * targets[idx][hinge]
                t += 1
            if not np.isfinite(w).all() or not np.isfinite(b).all():
                raise ValidationError(f"diverged at epoch {epoch}")
            self.weight_norm_history_.append(float(np.linalg.norm(w)))
        self.classes_ = classes
        self.weights_ = w
        self.biases_ = b
        self.majority_class_ = _majority_class(y, classes)
        self.fingerprint_ = fingerprint
        self.n_train_ = len(y)
        return self

    def predict_scores(self, X: DocTermMatrix, fingerprint: str | None = None):
        self._check_fitted()
        self._check_fingerprint(fingerprint)
        if X.n_terms != self.weights_.shape[1]:
            raise FeatureSpaceMismatch(
                f"{self.weights_.shape[1]} terms", f"{X.n_terms} terms"
            )
        scores = X.to_dense() @ self.weights_.T + self.biases_
        return [list(row) for row in scores]

    def predict(self, X: DocTermMatrix, fingerprint: str | None = None) -> list[ActionClass]:
        scores = self.predict_scores(X, fingerprint)
        return [self.classes_[_argmax(row)] for row in scores]


def _argmin(row) -> int:
    best = 0
    for i in range(1, len(row)):
        if row[i] < row[best]:
            best = i
    return best


def _argmax(row) -> int:
    best = 0
    for i in range(1, len(row)):
        if row[i] > row[best]:
            best = i
    return best


_VARIANTS = {
    "dummy": StratifiedDummyClassifier,
    "cnb": ComplementNaiveBayes,
    "sgd": LinearSGDClassifier,
}


def save_model(model: _BaseClassifier, sink) -> None:
    """Serialize to the documented JSON container (docs/model_format.md)."""
    model._check_fitted()
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "variant": model.variant,
        "fingerprint": model.fingerprint_,
        "classes": [c.value for c in model.classes_],
        "params": model.get_params(),
        "n_train": model.n_train_,
        "trained_at": model.trained_at_,
        "majority_class": model.majority_class_.value,
    }
    if model.variant == "dummy":
        payload["class_probs"] = model.class_probs_
    elif model.variant == "cnb":
        payload["weights"] = model.weights_.tolist()
    elif model.variant == "sgd":
        payload["weights"] = model.weights_.tolist()
        payload["biases"] = model.biases_.tolist()
    sink.write(json.dumps(payload, sort_keys=True))


def load_model(source) -> _BaseClassifier:
    try:
        payload = json.loads(source.read())
    except (ValueError, AttributeError) as exc:
        raise ModelFormatError(f"unreadable or truncated model file: {exc}") from exc
    version = payload.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r} (expected {MODEL_FORMAT_VERSION!r})"
        )
    variant = payload.get("variant")
    if variant not in _VARIANTS:
        raise ModelFormatError(f"unsupported variant {variant!r}")
    try:
        model = _VARIANTS[variant](**payload["params"])
        model.classes_ = [ActionClass(v) for v in payload["classes"]]
        model.fingerprint_ = payload.get("fingerprint")
        model.n_train_ = payload.get("n_train", 0)
        model.trained_at_ = payload.get("trained_at")
        model.majority_class_ = ActionClass(payload["majority_class"])
        if variant == "dummy":
            model.class_probs_ = payload["class_probs"]
            model.reset_rng()
        elif variant == "cnb":
            model.weights_ = np.array(payload["weights"])
        elif variant == "sgd":
            model.weights_ = np.array(payload["weights"])
            model.biases_ = np.array(payload["biases"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelFormatError(f"corrupt model payload: {exc}") from exc
    return model
