"""Clustering quality against ground truth: NMI and B-Cubed."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Hashable, Mapping, Sequence, Union

import numpy as np

# item -> cluster label, or a label sequence aligned by position
Partition = Union[Mapping[Hashable, Hashable], Sequence[Hashable]]

NMI_NORMALIZATION = "arithmetic"


def _aligned(predicted: Partition, truth: Partition) -> tuple[list, list]:
    if isinstance(predicted, Mapping) or isinstance(truth, Mapping):
        if not (isinstance(predicted, Mapping) and isinstance(truth, Mapping)):
            raise TypeError("pass both partitions as mappings or both as sequences")
        if predicted.keys() != truth.keys():
            missing = sorted(map(str, predicted.keys() ^ truth.keys()))[:5]
            raise ValueError(f"item sets differ (e.g. {', '.join(missing)})")
        keys = list(predicted)
        return [predicted[k] for k in keys], [truth[k] for k in keys]
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth):
        raise ValueError(f"item sets differ: {len(predicted)} vs {len(truth)} items")
    return predicted, truth


def _contingency(a: list, b: list) -> np.ndarray:
    _, ai = np.unique(np.asarray(a, dtype=object).astype(str), return_inverse=True)
    _, bi = np.unique(np.asarray(b, dtype=object).astype(str), return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1.0)
    return table


def _entropy(counts: np.ndarray, n: float) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(predicted: Partition, truth: Partition) -> float:
    """2 I(X;Y) / (H(X) + H(Y)) with natural logs; 1.0 when both entropies vanish."""
    a, b = _aligned(predicted, truth)
    n = len(a)
    if n == 0:
        return 1.0
    table = _contingency(a, b)
    rows, cols = table.sum(axis=1), table.sum(axis=0)
    h = _entropy(rows, n) + _entropy(cols, n)
    if h == 0.0:
        return 1.0
    nz = table > 0
    pxy = table[nz] / n
    outer = np.outer(rows, cols)[nz] / (n * n)
    mi = float((pxy * np.log(pxy / outer)).sum())
    return min(1.0, max(0.0, 2.0 * mi / h))


def f1(precision: float, recall: float) -> float:
    if precision <= 0 or recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def bcubed(predicted: Partition, truth: Partition) -> tuple[float, float, float]:
    """Item-averaged B-Cubed precision, recall and their harmonic mean."""
    a, b = _aligned(predicted, truth)
    n = len(a)
    if n == 0:
        return 1.0, 1.0, 1.0
    joint = Counter(zip(a, b))
    pred_size = Counter(a)
    true_size = Counter(b)
    # items in the same (predicted, true) cell share identical per-item scores
    p = math.fsum(c * c / pred_size[pa] for (pa, _), c in joint.items()) / n
    r = math.fsum(c * c / true_size[tb] for (_, tb), c in joint.items()) / n
    return p, r, f1(p, r)


@dataclass(frozen=True)
class MetricsReport:
    nmi: float
    bcubed_precision: float
    bcubed_recall: float
    bcubed_f1: float
    num_clusters: int
    num_photos: int
    mu: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(predicted: Partition, truth: Partition, mu: float | None = None) -> MetricsReport:
    a, b = _aligned(predicted, truth)
    p, r, f = bcubed(a, b)
    return MetricsReport(
        nmi=nmi(a, b),
        bcubed_precision=p,
        bcubed_recall=r,
        bcubed_f1=f,
        num_clusters=len(set(a)),
        num_photos=len(a),
        mu=mu,
    )
