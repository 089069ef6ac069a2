from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DatasetError
from .approx_math import F32
from .descriptor import FEATURE_ORDER_VERSION, WindowDescriptor

logger = logging.getLogger(__name__)

PERSON = 1
NON_PERSON = 0


def _as_features(x) -> np.ndarray:
    if isinstance(x, WindowDescriptor):
        x = x.features
    return np.asarray(x, dtype=F32).reshape(-1)


@dataclass(frozen=True)
class SvmModel:
    """Hyperplane D(X) = W . X + b stored in binary32."""

    weights: np.ndarray
    bias: np.float32
    feature_order_version: str = FEATURE_ORDER_VERSION

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=F32).reshape(-1)
        b = F32(self.bias)
        if w.size == 0:
            raise ValueError("model needs at least one weight")
        if not (np.all(np.isfinite(w)) and np.isfinite(b)):
            raise ValueError("model weights and bias must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    @classmethod
    def zeros(cls, dim: int, feature_order_version: str = FEATURE_ORDER_VERSION) -> "SvmModel":
        return cls(np.zeros(dim, dtype=F32), F32(0), feature_order_version)

    def negated(self) -> "SvmModel":
        return SvmModel(-self.weights, -self.bias, self.feature_order_version)

    def scaled(self, c: float) -> "SvmModel":
        return SvmModel(self.weights * F32(c), self.bias * F32(c), self.feature_order_version)


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: int

    def __post_init__(self):
        if self.label not in (PERSON, NON_PERSON):
            raise DatasetError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "features", _as_features(self.features))


def decision_value(model: SvmModel, x) -> float:
    """W . X + b, multiply then accumulate sequentially in binary32."""
    feats = _as_features(x)
    if feats.shape[0] != model.dim:
        raise ValueError(f"descriptor has {feats.shape[0]} features, model expects {model.dim}")
    # cumsum is a strict left-to-right float32 accumulation
    acc = np.cumsum(model.weights * feats, dtype=F32)[-1]
    return float(acc + model.bias)


def classify(model: SvmModel, x) -> int:
    # D(X) == 0 falls on the non-person side
    return PERSON if decision_value(model, x) > 0 else NON_PERSON


def _stack(samples: Sequence[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    dims = {s.features.shape[0] for s in samples}
    if len(dims) != 1:
        raise DatasetError(f"samples have mixed feature lengths {sorted(dims)}")
    X = np.stack([s.features for s in samples]).astype(np.float64)
    y = np.array([1.0 if s.label == PERSON else -1.0 for s in samples])
    return X, y


def _objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(hinge.mean())


def objective(model: SvmModel, samples: Sequence[LabeledSample], lam: float) -> float:
    """Regularized mean hinge loss lam/2 |W|^2 + mean(max(0, 1 - y D(X)))."""
    X, y = _stack(samples)
    return _objective(model.weights.astype(np.float64), float(model.bias), X, y, lam)


def train(
    samples: Sequence[LabeledSample],
    lam: float = 0.01,
    epochs: int = 20,
    seed: int = 0,
) -> SvmModel:
    """Pegasos subgradient descent with an unregularized bias.

    Steps are 1/(lam * t); each epoch visits the samples in a seeded random
    order. Returns the final iterate.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if not samples:
        raise DatasetError("no training samples")
    labels = {s.label for s in samples}
    if labels != {PERSON, NON_PERSON}:
        raise DatasetError(f"training needs both classes, got only label {labels.pop()}")

    X, y = _stack(samples)
    if not np.all(np.isfinite(X)):
        raise DatasetError("training descriptors contain non-finite values")
    n, d = X.shape

    rng = np.random.default_rng(seed)
    w = np.zeros(d)
    b = 0.0
    t = 0

    zero_obj = _objective(np.zeros(d), 0.0, X, y, lam)

    for epoch in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = y[i] * (X[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y[i] * X[i]
                b += eta * y[i]

        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("epoch %d: objective %.6f", epoch + 1, _objective(w, b, X, y, lam))

    model = SvmModel(w.astype(F32), F32(b))
    obj = objective(model, samples, lam)
    logger.info("trained on %d samples (%d features), objective %.6f", n, d, obj)
    if obj > zero_obj:
        logger.warning("final objective %.6f is above the zero model's %.6f", obj, zero_obj)
    return model


@dataclass(frozen=True)
class EvalReport:
    true_pos: int
    false_neg: int
    true_neg: int
    false_pos: int

    @classmethod
    def from_counts(cls, person_correct: int, person_total: int, non_person_correct: int, non_person_total: int) -> "EvalReport":
        return cls(
            true_pos=person_correct,
            false_neg=person_total - person_correct,
            true_neg=non_person_correct,
            false_pos=non_person_total - non_person_correct,
        )

    @property
    def positives(self) -> int:
        return self.true_pos + self.false_neg

    @property
    def negatives(self) -> int:
        return self.true_neg + self.false_pos

    @property
    def total(self) -> int:
        return self.positives + self.negatives

    @property
    def person_accuracy(self) -> float:
        return self.true_pos / self.positives if self.positives else math.nan

    @property
    def non_person_accuracy(self) -> float:
        return self.true_neg / self.negatives if self.negatives else math.nan

    @property
    def accuracy(self) -> float:
        return (self.true_pos + self.true_neg) / self.total


def evaluate(model: SvmModel, samples: Sequence[LabeledSample]) -> EvalReport:
    if not samples:
        raise DatasetError("cannot evaluate on an empty sample list")
    tp = fn = tn = fp = 0
    for s in samples:
        pred = classify(model, s.features)
        if s.label == PERSON:
            tp, fn = (tp + 1, fn) if pred == PERSON else (tp, fn + 1)
        else:
            tn, fp = (tn + 1, fp) if pred == NON_PERSON else (tn, fp + 1)
    return EvalReport(tp, fn, tn, fp)


def _pct(ratio: float) -> str:
    return "n/a" if math.isnan(ratio) else f"{100.0 * ratio:.2f}%"


def format_eval_table(report: EvalReport) -> str:
    rows = [
        ("Input images", "True detection", "False detection", "Accuracy rate"),
        ("With person", f"{report.true_pos}/{report.positives}", f"{report.false_neg}/{report.positives}", _pct(report.person_accuracy)),
        ("Without person", f"{report.true_neg}/{report.negatives}", f"{report.false_pos}/{report.negatives}", _pct(report.non_person_accuracy)),
        ("Total", f"{report.true_pos + report.true_neg}/{report.total}", f"{report.false_neg + report.false_pos}/{report.total}", _pct(report.accuracy)),
    ]
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    return "\n".join("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(r)).rstrip() for r in rows)
