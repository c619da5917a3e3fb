"""Independent reference implementations used only by the tests.

Each one is written from the definition and shares no code with the package.
"""

import math

import numpy as np
from scipy.optimize import linprog


def naive_incremental_cluster(n, sim, mu):
    """Recompute every photo-cluster average from scratch at each step."""
    clusters = []
    labels = []
    for i in range(n):
        scores = []
        for members in clusters:
            vals = [sim(i, m) for m in members]
            total = 0.0
            for v in vals:
                total += v
            scores.append(total / len(vals))
        if scores:
            best = max(scores)
            cid = scores.index(best)  # first index = lowest id on ties
            if best > mu:
                clusters[cid].append(i)
                labels.append(cid)
                continue
        clusters.append([i])
        labels.append(len(clusters) - 1)
    return labels


def dense_ppr(W, source, alpha):
    """Solve the restart-walk fixed point directly.

    v = alpha e_s + (1 - alpha) (P^T v + (d . v) e_s), d the dangling indicator.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    out = W.sum(axis=1)
    P = np.zeros_like(W)
    for r in range(n):
        if out[r] > 0:
            P[r] = W[r] / out[r]
    d = (out == 0).astype(float)
    e = np.zeros(n)
    e[source] = 1.0
    A = np.eye(n) - (1 - alpha) * (P.T + np.outer(e, d))
    return np.linalg.solve(A, alpha * e)


def brute_nmi(pred, truth):
    n = len(pred)
    ps, ts = sorted(set(pred)), sorted(set(truth))

    def H(labels, values):
        h = 0.0
        for v in values:
            p = sum(1 for x in labels if x == v) / n
            h -= p * math.log(p)
        return h

    mi = 0.0
    for a in ps:
        for b in ts:
            nab = sum(1 for x, y in zip(pred, truth) if x == a and y == b)
            if nab == 0:
                continue
            na = sum(1 for x in pred if x == a)
            nb = sum(1 for y in truth if y == b)
            mi += (nab / n) * math.log(n * nab / (na * nb))
    hx, hy = H(pred, ps), H(truth, ts)
    if hx + hy == 0:
        return 1.0
    return 2 * mi / (hx + hy)


def brute_bcubed(pred, truth):
    n = len(pred)
    prec = rec = 0.0
    for i in range(n):
        same_pred = [j for j in range(n) if pred[j] == pred[i]]
        same_true = [j for j in range(n) if truth[j] == truth[i]]
        both = [j for j in same_pred if truth[j] == truth[i]]
        prec += len(both) / len(same_pred)
        rec += len(both) / len(same_true)
    p, r = prec / n, rec / n
    f = 0.0 if p == 0 or r == 0 else 2 * p * r / (p + r)
    return p, r, f


def grid_objective_min(X, y, lam, lo=-5.0, hi=5.0, step=0.01, bias=0.0):
    """Exhaustive minimum of lam/2||w||^2 + mean hinge over a 2-D weight grid."""
    g = np.round(np.arange(lo, hi + step / 2, step), 10)
    best = math.inf
    for w1 in g:
        # vectorize the inner dimension
        W2 = g
        m = y[:, None] * (X[:, 0:1] * w1 + X[:, 1:2] * W2[None, :] + bias)
        obj = 0.5 * lam * (w1 * w1 + W2 * W2) + np.maximum(0.0, 1.0 - m).mean(axis=0)
        best = min(best, float(obj.min()))
    return best


def linearly_separable(X, y):
    """Exact LP feasibility check: exists (w, b) with y (w.x + b) >= 1 for all rows."""
    n, d = X.shape
    A = -y[:, None] * np.hstack([X, np.ones((n, 1))])
    res = linprog(np.zeros(d + 1), A_ub=A, b_ub=-np.ones(n),
                  bounds=[(None, None)] * (d + 1), method="highs")
    return res.status == 0
