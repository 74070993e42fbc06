"""Gaussian naive Bayes over the four quality grades, computed in log space."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from nbqe.errors import DataError, UsageError
from nbqe.grading import GRADES, Grade

MODEL_FORMAT_VERSION = 1
LOG_2PI = math.log(2.0 * math.pi)
VARIANCE_FLOOR_SCALE = 1e-9
MIN_VARIANCE_FLOOR = 1e-12


def gaussian_logpdf(x, mean, var):
    return -0.5 * (LOG_2PI + np.log(var) + (x - mean) ** 2 / var)


@dataclass(frozen=True)
class NaiveBayesModel:
    """Class priors plus per-class, per-feature Gaussian mean and variance.

    Rows of ``means`` and ``variances`` follow ``class_order``; columns follow
    the feature order used at fit time.
    """

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    variance_floor: float
    training_count: int
    class_order: tuple[Grade, ...] = GRADES

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def log_posterior(self, fv) -> np.ndarray:
        """Unnormalized log P(class) + sum_i log N(f_i; mean, var), one per class.

        The evidence term is the same for every class and is left out.
        """
        x = np.asarray(fv, dtype=float)
        if x.shape != (self.n_features,):
            raise DataError(f"feature vector has shape {x.shape}, model expects ({self.n_features},)")
        return np.log(self.priors) + gaussian_logpdf(x, self.means, self.variances).sum(axis=1)

    def posteriors(self, fv) -> np.ndarray:
        scores = self.log_posterior(fv)
        e = np.exp(scores - scores.max())
        return e / e.sum()

    def predict(self, fv) -> Grade:
        # np.argmax returns the first maximum, i.e. the earliest class on exact ties
        return self.class_order[int(np.argmax(self.log_posterior(fv)))]

    def predict_batch(self, matrix) -> list[Grade]:
        return [self.predict(row) for row in np.asarray(matrix, dtype=float)]

    def to_dict(self) -> dict:
        return {
            "version": MODEL_FORMAT_VERSION,
            "class_order": [g.label for g in self.class_order],
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "variance_floor": self.variance_floor,
            "training_count": self.training_count,
        }

    def to_json(self) -> str:
        # json emits float repr, which round-trips exactly
        return json.dumps(self.to_dict(), indent=1)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_dict(cls, doc: Mapping) -> NaiveBayesModel:
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise DataError(f"unsupported model version {doc.get('version')!r}")
        order = tuple(Grade.parse(g) for g in doc["class_order"])
        if order != GRADES:
            raise DataError(f"model class order {[g.label for g in order]} is not canonical")
        priors = np.array(doc["priors"], dtype=float)
        means = np.array(doc["means"], dtype=float)
        variances = np.array(doc["variances"], dtype=float)
        if priors.shape != (len(GRADES),) or means.ndim != 2 or means.shape[0] != len(GRADES) \
                or variances.shape != means.shape:
            raise DataError("model arrays have inconsistent shapes")
        if np.any(priors <= 0) or np.any(variances <= 0):
            raise DataError("model priors and variances must be positive")
        return cls(priors, means, variances, float(doc["variance_floor"]),
                   int(doc["training_count"]), order)

    @classmethod
    def load(cls, path: str | Path) -> NaiveBayesModel:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"{path}: no such file") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(doc)


def fit(features, labels: Sequence[Grade]) -> NaiveBayesModel:
    """Estimate Laplace-smoothed priors and per-class Gaussian parameters.

    Variances are population variances floored at 1e-9 times the largest
    global per-feature variance (never below 1e-12). A grade with no training
    rows borrows the global mean and variance.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise UsageError(f"features must be a 2-d matrix, got shape {X.shape}")
    if len(labels) != X.shape[0]:
        raise UsageError(f"{X.shape[0]} feature rows but {len(labels)} labels")
    if X.shape[0] == 0:
        raise UsageError("cannot fit on zero examples")
    if not np.all(np.isfinite(X)):
        bad = int(np.argwhere(~np.isfinite(X))[0][0])
        raise DataError(f"non-finite feature value in training row {bad}")
    y = np.array([int(Grade(g)) for g in labels])
    n, k = X.shape[0], len(GRADES)

    global_mean = X.mean(axis=0)
    global_var = X.var(axis=0)
    floor = max(VARIANCE_FLOOR_SCALE * float(global_var.max()), MIN_VARIANCE_FLOOR)

    counts = np.bincount(y, minlength=k)
    priors = (counts + 1.0) / (n + k)
    means = np.tile(global_mean, (k, 1))
    variances = np.tile(global_var, (k, 1))
    for c in range(k):
        if counts[c]:
            rows = X[y == c]
            means[c] = rows.mean(axis=0)
            variances[c] = rows.var(axis=0)
    variances = np.maximum(variances, floor)
    return NaiveBayesModel(priors, means, variances, floor, n)
