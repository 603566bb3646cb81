"""Independent brute-force oracles used to derive and check expected values.

Everything here is written from the definitions, deliberately not sharing
code paths with the library: explicit loops, pairwise counting, and central
finite differences. Slow is fine; these run on small instances.
"""

from __future__ import annotations

import math

import numpy as np


# ---------------------------------------------------------------------------
# Confusion metrics
# ---------------------------------------------------------------------------


def brute_confusion(acts, prds, indices, threshold):
    """(tp, tn, fp, fn) by walking every (record, attribute) pair."""
    tp = tn = fp = fn = 0
    for act_row, prd_row in zip(acts, prds):
        for j in indices:
            actual = act_row[j] == 1
            positive = prd_row[j] >= threshold
            if actual and positive:
                tp += 1
            elif actual and not positive:
                fn += 1
            elif not actual and positive:
                fp += 1
            else:
                tn += 1
    return tp, tn, fp, fn


def brute_report(tp, tn, fp, fn):
    """(accuracy, precision, recall, f1), None where the denominator is 0."""
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else None
    precision = tp / (tp + fp) if (tp + fp) else None
    recall = tp / (tp + fn) if (tp + fn) else None
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return accuracy, precision, recall, f1


def brute_average_precision(scores, labels):
    """AP by pairwise rank counting: for each positive item, its rank is the
    number of items at or above it (score strictly greater, or equal score
    with smaller original index), and its precision is the fraction of those
    that are positive."""
    n = len(scores)
    precisions = []
    for i in range(n):
        if labels[i] != 1:
            continue
        at_or_above = 0
        positives_at_or_above = 0
        for j in range(n):
            ranked_before = scores[j] > scores[i] or (scores[j] == scores[i] and j <= i)
            if ranked_before:
                at_or_above += 1
                if labels[j] == 1:
                    positives_at_or_above += 1
        precisions.append(positives_at_or_above / at_or_above)
    if not precisions:
        return None
    return sum(precisions) / len(precisions)


def brute_mean_average_precision(acts, prds):
    k = len(acts[0]) if acts else 0
    aps = []
    for j in range(k):
        ap = brute_average_precision([row[j] for row in prds],
                                     [row[j] for row in acts])
        if ap is not None:
            aps.append(ap)
    if not aps:
        return None
    return sum(aps) / len(aps)


# ---------------------------------------------------------------------------
# KL objective and finite differences
# ---------------------------------------------------------------------------


def oracle_kl(p, y):
    """KL(P || Q) from the definition, explicit loops."""
    n = len(y)
    weights = [[0.0] * n for _ in range(n)]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d2 = (y[i][0] - y[j][0]) ** 2 + (y[i][1] - y[j][1]) ** 2
            weights[i][j] = 1.0 / (1.0 + d2)
            total += weights[i][j]
    kl = 0.0
    for i in range(n):
        for j in range(n):
            if i == j or p[i][j] <= 0.0:
                continue
            q = weights[i][j] / total
            kl += p[i][j] * math.log(p[i][j] / q)
    return kl


def finite_difference_gradient(p, y, step=1e-5):
    """Central finite differences of the KL objective."""
    y = np.asarray(y, dtype=np.float64)
    grad = np.zeros_like(y)
    for i in range(y.shape[0]):
        for c in range(y.shape[1]):
            y_plus = y.copy()
            y_plus[i, c] += step
            y_minus = y.copy()
            y_minus[i, c] -= step
            grad[i, c] = (oracle_kl(p, y_plus) - oracle_kl(p, y_minus)) / (2 * step)
    return grad


# ---------------------------------------------------------------------------
# Embedding quality oracles
# ---------------------------------------------------------------------------


def _rank_orders(x):
    """Stable nearest-first orderings (self excluded) for every point."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
    orders = []
    for i in range(n):
        order = [j for j in np.argsort(d2[i], kind="stable") if j != i]
        orders.append(order)
    return orders


def trustworthiness(x, y, k):
    """Rank-based neighborhood preservation of embedding y vs input x.

    1 is perfect; each embedded neighbor that is not a true k-nearest
    neighbor is penalized by how far down the true ranking it sits.
    """
    n = len(x)
    assert k < n / 2, "trustworthiness requires k < n/2"
    input_orders = _rank_orders(x)
    output_orders = _rank_orders(y)
    input_ranks = []
    for i in range(n):
        rank = {j: pos + 1 for pos, j in enumerate(input_orders[i])}
        input_ranks.append(rank)
    penalty = 0.0
    for i in range(n):
        true_neighbors = set(input_orders[i][:k])
        for j in output_orders[i][:k]:
            if j not in true_neighbors:
                penalty += input_ranks[i][j] - k
    return 1.0 - penalty * 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0))


def silhouette(y, labels):
    """Mean silhouette coefficient with Euclidean distances."""
    y = np.asarray(y, dtype=np.float64)
    labels = np.asarray(labels)
    n = y.shape[0]
    dist = np.sqrt(((y[:, None, :] - y[None, :, :]) ** 2).sum(axis=2))
    unique = np.unique(labels)
    scores = []
    for i in range(n):
        own = labels[i]
        same = (labels == own) & (np.arange(n) != i)
        if not same.any():
            scores.append(0.0)
            continue
        a = dist[i][same].mean()
        b = min(dist[i][labels == other].mean()
                for other in unique if other != own)
        scores.append((b - a) / max(a, b))
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def brute_points_in_polygon(points, polygon):
    """Even-odd containment per point via matplotlib's path machinery,
    independent of the service implementation. Boundary points are not
    reliable here, so use it only with strictly interior/exterior cases."""
    from matplotlib.path import Path as MplPath

    path = MplPath(polygon)
    return [bool(v) for v in path.contains_points(points)]
