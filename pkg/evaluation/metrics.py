"""
Per-split metrics: classification accuracy and the operating condition
ID error (also called set identification error).
"""
import numpy as np

from core.exceptions import InvalidSplitError
from evaluation.neighbors import knn_predict_many, loo_predictions

POOL_TRAIN = 'train'
POOL_TEST = 'test'


def classification_accuracy(train_pts, train_labels, test_pts, test_labels, k):
    """Fraction of test rows whose kNN(k) class matches the true class."""
    test_labels = np.asarray(test_labels, dtype=str)
    if test_labels.size == 0:
        raise InvalidSplitError("No test rows to classify")
    k = min(k, len(train_labels))
    predicted = knn_predict_many(train_pts, train_labels, test_pts, k)
    return float(np.mean(predicted == test_labels))


def operating_condition_id_error(train_pts, train_labels, test_pts, test_labels, k):
    """
    How often leave-one-out kNN(k) fails to tell test rows from training rows
    of the same class.

    Training rows of the test bearing's class are pooled with the test rows
    and tagged by origin. The error is measured on test-tagged points only.
    High error means the two sets are hard to separate, i.e. the shift
    between operating conditions is small.
    """
    train_labels = np.asarray(train_labels, dtype=str)
    test_labels = np.asarray(test_labels, dtype=str)
    classes = np.unique(test_labels)
    if classes.size != 1:
        raise InvalidSplitError(
            f"Test rows must share one class for the ID error, found {', '.join(classes)}"
        )
    same = train_labels == classes[0]
    if not same.any():
        raise InvalidSplitError(f"No training rows of class '{classes[0]}' to compare against")

    train_pts = np.asarray(train_pts, dtype=float)[same]
    test_pts = np.asarray(test_pts, dtype=float)
    pool = np.vstack([train_pts, test_pts])
    origin = np.array([POOL_TRAIN] * len(train_pts) + [POOL_TEST] * len(test_pts))

    k = min(k, len(pool) - 1)
    predicted = loo_predictions(pool, origin, k)
    on_test = origin == POOL_TEST
    return float(np.mean(predicted[on_test] != POOL_TEST))
