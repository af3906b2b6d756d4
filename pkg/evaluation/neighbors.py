"""
k-nearest-neighbour voting in the projected plane.

Neighbours are ordered by Euclidean distance, equal distances by lower
row index. A vote tie goes to whichever tied class has the nearest
neighbour among the k.
"""
import numpy as np
from scipy.spatial.distance import cdist

from core.exceptions import InvalidArgumentError
from core.models import Reweighting


def _encode(labels):
    classes, codes = np.unique(np.asarray(labels, dtype=str), return_inverse=True)
    return classes, codes.ravel()


def neighbor_order(train_pts, query_pts, exclude_self=False):
    """
    Train indices sorted nearest first, one row per query.

    With ``exclude_self`` the queries are the training points themselves
    and each point is dropped from its own row.
    """
    train_pts = np.atleast_2d(np.asarray(train_pts, dtype=float))
    query_pts = np.atleast_2d(np.asarray(query_pts, dtype=float))
    if train_pts.shape[0] == 0:
        raise InvalidArgumentError("kNN needs at least one training point")

    dist = cdist(query_pts, train_pts)
    if exclude_self:
        np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind='stable')
    if exclude_self:
        order = order[:, :-1]
    return order


def vote_table(neighbor_codes, n_classes):
    """
    Winning class code for every prefix length k = 1..K.

    Args:
        neighbor_codes: q x K class codes of the neighbours, nearest first

    Returns:
        q x K array; column k-1 is the kNN(k) vote
    """
    q, K = neighbor_codes.shape
    onehot = neighbor_codes[:, :, None] == np.arange(n_classes)[None, None, :]
    counts = np.cumsum(onehot, axis=1)
    # First position of each class; K if absent
    first = np.where(onehot.any(axis=1), onehot.argmax(axis=1), K)

    best = counts.max(axis=2, keepdims=True)
    tied = counts == best
    rank = np.where(tied, first[:, None, :], K + 1)
    return rank.argmin(axis=2)


def knn_predict_many(train_pts, train_labels, query_pts, k):
    """kNN(k) label for each query row."""
    classes, codes = _encode(train_labels)
    n = codes.size
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in 1..{n}, got {k}")
    order = neighbor_order(train_pts, query_pts)[:, :k]
    winners = vote_table(codes[order], classes.size)[:, k - 1]
    return classes[winners]


def knn_predict(train_pts, train_labels, query, k):
    """kNN(k) label for a single query point."""
    return knn_predict_many(train_pts, train_labels, np.atleast_2d(query), k)[0]


def loo_prediction_table(points, labels, k_max):
    """
    Leave-one-out kNN predictions for every k up to k_max.

    Returns:
        n x k_max array of labels; column k-1 holds kNN(k)
    """
    classes, codes = _encode(labels)
    n = codes.size
    if n < 2:
        raise InvalidArgumentError("Leave-one-out needs at least two points")
    if not 1 <= k_max <= n - 1:
        raise InvalidArgumentError(f"k_max must lie in 1..{n - 1}, got {k_max}")
    order = neighbor_order(points, points, exclude_self=True)[:, :k_max]
    return classes[vote_table(codes[order], classes.size)]


def loo_predictions(points, labels, k):
    """Leave-one-out kNN(k) prediction for each point."""
    return loo_prediction_table(points, labels, k)[:, k - 1]


def reweighted_error(predicted, actual, scheme=Reweighting.INVERSE_CLASS_FREQUENCY):
    """
    Misclassification rate, optionally balanced over classes.

    With inverse class frequency every class counts equally: the result is
    the mean of the per-class error rates.
    """
    predicted = np.asarray(predicted, dtype=str)
    actual = np.asarray(actual, dtype=str)
    wrong = predicted != actual
    if wrong.size == 0:
        raise InvalidArgumentError("No predictions to score")
    if scheme == Reweighting.NONE:
        return float(wrong.mean())
    return float(np.mean([wrong[actual == c].mean() for c in np.unique(actual)]))


def loo_errors(points, labels, k_max, scheme=Reweighting.INVERSE_CLASS_FREQUENCY):
    """Reweighted leave-one-out error for k = 1..k_max."""
    table = loo_prediction_table(points, labels, k_max)
    labels = np.asarray(labels, dtype=str)
    return np.array([reweighted_error(table[:, j], labels, scheme) for j in range(k_max)])


def select_k_star(points, labels, k_max, scheme=Reweighting.INVERSE_CLASS_FREQUENCY,
                  return_errors=False):
    """
    The k in 1..k_max with the lowest reweighted leave-one-out error.

    Ties go to the smallest k. k_max is clamped to n - 1.
    """
    n = len(labels)
    if k_max < 1:
        raise InvalidArgumentError(f"k_max must be at least 1, got {k_max}")
    errors = loo_errors(points, labels, min(k_max, n - 1), scheme)
    k_star = int(np.argmin(errors)) + 1
    if return_errors:
        return k_star, errors
    return k_star
