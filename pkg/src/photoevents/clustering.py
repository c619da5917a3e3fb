"""One-pass incremental clustering of a photo stream."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

from ._validation import check_scalar


@dataclass
class Cluster:
    cluster_id: int
    members: list = field(default_factory=list)


@dataclass
class Clustering:
    clusters: list[Cluster]
    mu: float
    assignment: dict
    items: list = field(default_factory=list)

    @property
    def labels(self) -> list[int]:
        """Cluster id per item, in stream order."""
        return [self.assignment[m] for m in self.items]

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @classmethod
    def from_labels(cls, items: Sequence, labels: Sequence[int], mu: float) -> "Clustering":
        clusters: list[Cluster] = []
        for item, lab in zip(items, labels):
            if lab == len(clusters):
                clusters.append(Cluster(lab))
            clusters[lab].members.append(item)
        return cls(clusters, mu, dict(zip(items, (int(x) for x in labels))), list(items))


class CountingTheta:
    """Wraps a pair similarity with a symmetric cache and an evaluation counter."""

    def __init__(self, theta: Callable):
        self.theta = theta
        self.calls = 0
        self._cache: dict = {}

    def __call__(self, a, b):
        key = (a, b)
        val = self._cache.get(key)
        if val is None:
            self.calls += 1
            val = float(self.theta(a, b))
            self._cache[key] = val
            self._cache[(b, a)] = val
        return val


def photo_cluster_similarity(p, members: Sequence, theta: Callable) -> float:
    """Arithmetic mean of θ(p, m) over cluster members, summed in member order."""
    if len(members) == 0:
        raise ValueError("cluster has no members")
    total = 0.0
    for m in members:
        total += theta(p, m)
    return total / len(members)


def incremental_cluster(stream: Sequence[Hashable], theta: Callable, mu: float,
                        times: Sequence[float] | None = None, window: float | None = None) -> Clustering:
    """Assign each item to the cluster of highest mean similarity if it beats ``mu``.

    ``stream`` must already be in processing order. A joined cluster must have
    mean similarity strictly greater than ``mu``; ties between clusters go to
    the lowest cluster id. With ``window`` set, only clusters whose newest
    member is at most ``window`` time units before the current item compete.
    """
    if window is not None and times is None:
        raise ValueError("window requires times")
    labels: list[int] = []
    members: list[list] = []
    newest: list[int] = []
    for pos, p in enumerate(stream):
        best, best_sim = -1, None
        for cid, mem in enumerate(members):
            if window is not None and times[pos] - times[newest[cid]] > window:
                continue
            sim = photo_cluster_similarity(p, mem, theta)
            if best_sim is None or sim > best_sim:
                best, best_sim = cid, sim
        if best_sim is not None and best_sim > mu:
            members[best].append(p)
            newest[best] = pos
            labels.append(best)
        else:
            labels.append(len(members))
            members.append([p])
            newest.append(pos)
    return Clustering.from_labels(list(stream), labels, mu)


def _cluster_precomputed(S: np.ndarray, mu: float, times=None, window=None) -> np.ndarray:
    n = S.shape[0]
    labels = np.empty(n, dtype=np.intp)
    if n == 0:
        return labels
    labels[0] = 0
    counts = [1]
    newest = [0]
    for i in range(1, n):
        k = len(counts)
        # bincount accumulates in index order, i.e. member arrival order
        sums = np.bincount(labels[:i], weights=S[i, :i], minlength=k)
        means = sums / np.asarray(counts, dtype=float)
        if window is not None:
            ok = times[i] - times[np.asarray(newest)] <= window
            means = np.where(ok, means, -np.inf)
        best = int(np.argmax(means))
        if np.isfinite(means[best]) and means[best] > mu:
            labels[i] = best
            counts[best] += 1
            newest[best] = i
        else:
            labels[i] = k
            counts.append(1)
            newest.append(i)
    return labels


class IncrementalEventClustering(ClusterMixin, BaseEstimator):
    """Estimator wrapper around the one-pass assignment.

    ``fit`` takes a precomputed ``(n, n)`` similarity matrix whose row/column
    order is the stream order (``metric="precomputed"``), or a sequence of
    items together with ``metric`` set to a callable ``θ(a, b)``.

    Parameters
    ----------
    mu : float
        Join threshold; a photo joins its best cluster only if the mean
        similarity is strictly greater than ``mu``.
    metric : "precomputed" or callable
    window : float or None
        Optional candidate window on ``times`` passed to ``fit``.
    """

    def __init__(self, mu=0.5, metric="precomputed", window=None):
        self.mu = mu
        self.metric = metric
        self.window = window

    def fit(self, X, y=None, times=None):
        mu = check_scalar(self.mu, "mu")
        if self.window is not None:
            check_scalar(self.window, "window", min_val=0.0)
            if times is None:
                raise ValueError("window requires times")
            times = np.asarray(times, dtype=float)
        if callable(self.metric):
            items = list(X)
            counter = CountingTheta(self.metric)
            result = incremental_cluster(items, counter, mu, times, self.window)
            self.labels_ = np.asarray(result.labels, dtype=np.intp)
            self.n_evaluations_ = counter.calls
        elif self.metric == "precomputed":
            S = check_array(X, dtype=float, ensure_min_samples=0, ensure_min_features=0)
            if S.shape[0] != S.shape[1]:
                raise ValueError(f"precomputed similarity must be square, got {S.shape}")
            self.labels_ = _cluster_precomputed(S, mu, times, self.window)
            items = list(range(S.shape[0]))
        else:
            raise ValueError(f"metric must be 'precomputed' or callable, got {self.metric!r}")
        self.n_clusters_ = int(self.labels_.max()) + 1 if len(self.labels_) else 0
        self.clustering_ = Clustering.from_labels(items, self.labels_.tolist(), mu)
        return self
