"""Training-pair sampling, feature standardization and the linear SVM behind θ."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import ConfigError, check_scalar
from .data import Photo
from .features import FeatureVector

CALIBRATIONS = ("logistic", "identity")


# --
# Pair sampling

@dataclass(frozen=True)
class SamplingConfig:
    max_neg_pos_ratio: float = 5.0
    max_positive_pairs: int = 50000
    seed: int = 0

    def __post_init__(self):
        check_scalar(self.max_neg_pos_ratio, "max_neg_pos_ratio", min_val=0.0, max_val=5.0, include_min=False)
        check_scalar(self.max_positive_pairs, "max_positive_pairs", min_val=1, integer=True)
        check_scalar(self.seed, "seed", integer=True)


@dataclass
class TrainingPair:
    photo_id_i: str
    photo_id_j: str
    label: int
    features: FeatureVector | None = None

    def __post_init__(self):
        if not self.photo_id_i < self.photo_id_j:
            raise ValueError(f"pair ids must be canonically ordered: {self.photo_id_i!r}, {self.photo_id_j!r}")
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")


def _canonical(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def sample_pairs(photos: Sequence[Photo], config: SamplingConfig = SamplingConfig()) -> list[TrainingPair]:
    """All within-event pairs (capped) plus uniformly drawn cross-event pairs.

    Photos without an ``event_id`` are ignored. The number of negatives is
    ``floor(max_neg_pos_ratio * positives)`` or every cross-event pair if
    fewer exist. Output order: positives sorted, then negatives in draw order.
    """
    rng = np.random.default_rng(config.seed)
    labeled = sorted((p for p in photos if p.event_id is not None), key=lambda p: p.photo_id)
    by_event: dict[str, list[str]] = {}
    for p in labeled:
        by_event.setdefault(p.event_id, []).append(p.photo_id)

    positives = sorted(pair for ids in by_event.values() for pair in combinations(ids, 2))
    if not positives:
        raise ValueError("no positive training pairs")
    if len(positives) > config.max_positive_pairs:
        keep = np.sort(rng.choice(len(positives), size=config.max_positive_pairs, replace=False))
        positives = [positives[k] for k in keep]

    n = len(labeled)
    sizes = [len(v) for v in by_event.values()]
    total_cross = (n * n - sum(s * s for s in sizes)) // 2
    want = min(int(math.floor(config.max_neg_pos_ratio * len(positives))), total_cross)

    ids = [p.photo_id for p in labeled]
    events = [p.event_id for p in labeled]
    if want == 0:
        negatives = []
    elif 2 * want >= total_cross:
        cross = [(ids[a], ids[b]) for a, b in combinations(range(n), 2) if events[a] != events[b]]
        pick = rng.choice(len(cross), size=want, replace=False)
        negatives = [cross[k] for k in pick]
    else:
        seen: set[tuple[str, str]] = set()
        negatives = []
        while len(negatives) < want:
            a, b = rng.integers(0, n, size=2)
            if events[a] == events[b]:
                continue
            pair = _canonical(ids[a], ids[b])
            if pair in seen:
                continue
            seen.add(pair)
            negatives.append(pair)

    return ([TrainingPair(a, b, 1) for a, b in positives]
            + [TrainingPair(a, b, -1) for a, b in negatives])


# --
# Standardization

class FeatureStandardizer(TransformerMixin, BaseEstimator):
    """Z-scores with population std; zero-variance columns map to 0."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.mean_ = X.mean(axis=0)
        # rounding leaves ~1e-17 spread on constant columns; pin those to exactly 0
        constant = X.max(axis=0) == X.min(axis=0)
        self.std_ = np.where(constant, 0.0, X.std(axis=0))
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = check_array(X, dtype=float, ensure_min_samples=0)
        return standardize(X, self.mean_, self.std_)


def fit_standardization(X) -> tuple[np.ndarray, np.ndarray]:
    s = FeatureStandardizer().fit(X)
    return s.mean_, s.std_


def standardize(X, means, stds) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    means = np.asarray(means, dtype=float)
    stds = np.asarray(stds, dtype=float)
    safe = np.where(stds > 0, stds, 1.0)
    return np.where(stds > 0, (X - means) / safe, 0.0)


# --
# Pegasos

def hinge_objective(w, b, X, y, lam) -> float:
    """lam/2 ||w||^2 + mean hinge loss; the bias is not regularized."""
    margins = y * (X @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


def optimal_bias(scores, y) -> float:
    """Exact minimizer over b of mean max(0, 1 - y (score + b)).

    The loss is convex and piecewise linear with kinks at ``y - score``; it is
    evaluated at every kink via prefix sums and the smallest minimizing kink
    is returned.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y, dtype=float)
    pos = np.sort(1.0 - scores[y > 0])       # positive i is active while b < pos[i]
    neg = np.sort(-1.0 - scores[y <= 0])     # negative i is active while b > neg[i]
    cand = np.unique(np.concatenate([pos, neg]))
    if cand.size == 0:
        return 0.0
    pos_tail = np.concatenate([np.cumsum(pos[::-1])[::-1], [0.0]])
    neg_head = np.concatenate([[0.0], np.cumsum(neg)])
    kp = np.searchsorted(pos, cand, side="right")   # positives with pos > b start here
    kn = np.searchsorted(neg, cand, side="left")    # negatives with neg < b end here
    loss = (pos_tail[kp] - cand * (len(pos) - kp)) + (cand * kn - neg_head[kn])
    return float(cand[int(np.argmin(loss))])


class PegasosSVM(ClassifierMixin, BaseEstimator):
    """Linear SVM: Pegasos subgradient steps on the weights, exact bias per epoch.

    Within an epoch every sample is visited once in a seeded random order and
    the weights take the Pegasos step ``w <- (1 - eta lam) w + eta y x`` on
    margin violations, ``eta = 1 / (lam t)``. The unregularized bias is held
    fixed during the epoch and re-solved exactly at its end. The returned
    iterate is the epoch-end iterate (or the zero start) with the lowest
    training objective, so the objective never exceeds 1.

    Parameters
    ----------
    lam : float
        L2 regularization strength.
    epochs : int
        Passes over the training set.
    seed : int
        Seed for the visiting order.
    """

    def __init__(self, lam=1e-3, epochs=20, seed=0):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        check_scalar(self.lam, "lam", min_val=0.0, include_min=False)
        epochs = check_scalar(self.epochs, "epochs", min_val=1, integer=True)
        X, y = check_X_y(X, y, dtype=float)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise ValueError("degenerate training labels")
        ys = np.where(y == self.classes_[1], 1.0, -1.0)

        lam = float(self.lam)
        n, d = X.shape
        rng = np.random.default_rng(self.seed)
        rows = X.tolist()
        labels = ys.tolist()
        w = [0.0] * d
        b = 0.0
        best_w, best_b = np.zeros(d), 0.0
        best_obj = hinge_objective(best_w, best_b, X, ys, lam)
        history = [best_obj]
        t = 0
        for _ in range(epochs):
            for k in rng.permutation(n).tolist():
                t += 1
                eta = 1.0 / (lam * t)
                x, yk = rows[k], labels[k]
                shrink = 1.0 - eta * lam
                if yk * (sum(wi * xi for wi, xi in zip(w, x)) + b) < 1.0:
                    step = eta * yk
                    w = [shrink * wi + step * xi for wi, xi in zip(w, x)]
                else:
                    w = [shrink * wi for wi in w]
            cur_w = np.array(w)
            b = optimal_bias(X @ cur_w, ys)
            obj = hinge_objective(cur_w, b, X, ys, lam)
            history.append(obj)
            if obj < best_obj:
                best_obj, best_w, best_b = obj, cur_w, b
        self.coef_ = best_w
        self.intercept_ = float(best_b)
        self.objective_ = best_obj
        self.objective_history_ = history
        self.n_iter_ = t
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float, ensure_min_samples=0)
        return X @ self.coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(X) > 0, self.classes_[1], self.classes_[0])

    def objective(self, X, y) -> float:
        check_is_fitted(self, "coef_")
        ys = np.where(np.asarray(y) == self.classes_[1], 1.0, -1.0)
        return hinge_objective(self.coef_, self.intercept_, np.asarray(X, dtype=float), ys, float(self.lam))


# --
# The fitted similarity θ

_THETA_LO = np.nextafter(0.0, 1.0)
_THETA_HI = np.nextafter(1.0, 0.0)


def logistic(z):
    """1 / (1 + exp(-z)), clamped into the open interval (0, 1)."""
    z = np.asarray(z, dtype=float)
    # split by sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, _THETA_LO, _THETA_HI)


@dataclass
class SimilarityModel:
    """Standardization stats plus linear weights; callable as θ on feature rows.

    ``config``, ``tag_index``, ``text_index`` and ``stopwords`` carry what is
    needed to featurize new photos exactly as during training.
    """

    feature_names: list[str]
    weights: list[float]
    bias: float
    means: list[float]
    stds: list[float]
    lam: float
    epochs: int
    seed: int
    calibration: str = "logistic"
    config_digest: str = ""
    config: dict = field(default_factory=dict)
    tag_index: dict | None = None
    text_index: dict | None = None
    stopwords: list[str] | None = None

    def __post_init__(self):
        d = len(self.feature_names)
        if not (len(self.weights) == len(self.means) == len(self.stds) == d):
            raise ValueError("weights, means, stds and feature_names must have equal length")
        if any(s < 0 for s in self.stds):
            raise ValueError("feature stds must be non-negative")
        if self.calibration not in CALIBRATIONS:
            raise ConfigError(f"calibration must be one of {CALIBRATIONS}, got {self.calibration!r}")

    def _rows(self, X) -> np.ndarray:
        if isinstance(X, FeatureVector):
            X = X.as_array(self.feature_names)
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        return X, single

    def margins(self, X) -> np.ndarray:
        X, _ = self._rows(X)
        Z = standardize(X, self.means, self.stds)
        return Z @ np.asarray(self.weights, dtype=float) + self.bias

    def score_margin(self, fv) -> float:
        return float(self.margins(fv)[0])

    def thetas(self, X) -> np.ndarray:
        m = self.margins(X)
        return logistic(m) if self.calibration == "logistic" else m

    def theta(self, fv) -> float:
        return float(self.thetas(fv)[0])

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "means": [float(m) for m in self.means],
            "stds": [float(s) for s in self.stds],
            "lambda": float(self.lam),
            "epochs": int(self.epochs),
            "seed": int(self.seed),
            "calibration": self.calibration,
            "config_digest": self.config_digest,
            "config": self.config,
            "tag_index": self.tag_index,
            "text_index": self.text_index,
            "stopwords": self.stopwords,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimilarityModel":
        return cls(
            feature_names=list(d["feature_names"]),
            weights=[float(w) for w in d["weights"]],
            bias=float(d["bias"]),
            means=[float(m) for m in d["means"]],
            stds=[float(s) for s in d["stds"]],
            lam=float(d["lambda"]),
            epochs=int(d["epochs"]),
            seed=int(d["seed"]),
            calibration=d.get("calibration", "logistic"),
            config_digest=d.get("config_digest", ""),
            config=d.get("config") or {},
            tag_index=d.get("tag_index"),
            text_index=d.get("text_index"),
            stopwords=d.get("stopwords"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SimilarityModel":
        return cls.from_dict(json.loads(text))


def train(X, y, feature_names: Sequence[str], lam=1e-3, epochs=20, seed=0,
          calibration="logistic") -> SimilarityModel:
    """Standardize ``X`` (pair features), fit the SVM and wrap the result."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training requires a non-empty 2-D feature matrix")
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate training labels")
    means, stds = fit_standardization(X)
    svm = PegasosSVM(lam=lam, epochs=epochs, seed=seed).fit(standardize(X, means, stds), y)
    # classes_ is sorted, so the positive class is classes_[1]
    return SimilarityModel(
        feature_names=list(feature_names),
        weights=svm.coef_.tolist(),
        bias=svm.intercept_,
        means=means.tolist(),
        stds=stds.tolist(),
        lam=float(lam),
        epochs=int(epochs),
        seed=int(seed),
        calibration=calibration,
    )


def score_margin(model: SimilarityModel, fv) -> float:
    return model.score_margin(fv)


def theta(model: SimilarityModel, fv) -> float:
    return model.theta(fv)
