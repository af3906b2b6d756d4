"""
Training policy for the condition adjustment.
"""
import logging

import numpy as np

from adjustment.regression import AdjustmentModel, adjust_matrix, fit_matrix
from core.exceptions import DataError
from core.models import Method
from core.recordings import file_hash
from features.matrix import ROLE_TRAIN, read_store, store_filename, write_store

logger = logging.getLogger(__name__)


def condition_mask(matrix, conditions):
    """Rows whose (rpm, Nm) is one of ``conditions``."""
    mask = np.zeros(matrix.n_rows, dtype=bool)
    for speed, load in conditions:
        mask |= np.isclose(matrix.speed_rpm, speed) & np.isclose(matrix.load_nm, load)
    return mask


class AdjustmentService:
    """
    Fits the adjustment on healthy training rows and applies it to everything.

    Faulty rows only enter the fit when ``allow_mixed_training`` is set; a
    training set with no healthy rows is always refused.
    """

    def __init__(self, allow_mixed_training=False):
        self.allow_mixed_training = allow_mixed_training

    def training_rows(self, matrix):
        """Indices of rows the fit may use."""
        healthy = matrix.is_healthy
        if not healthy.any():
            raise DataError(
                "Adjustment training set has no healthy rows; the trend must be "
                "learned from healthy data"
            )
        if self.allow_mixed_training:
            return np.arange(matrix.n_rows)
        return np.flatnonzero(healthy)

    def fit(self, train, trained_on=''):
        rows = self.training_rows(train)
        healthy_only = bool(train.is_healthy[rows].all())
        if not healthy_only:
            logger.warning(f"Fitting adjustment on {rows.size} rows including faulty ones")
        return fit_matrix(train.subset(rows, role=ROLE_TRAIN), trained_on, healthy_only)


class AdjustmentRun:
    """
    The ``adjust`` command: one model from a feature store, applied to all rows.

    Held-out conditions never enter training, and whole bearings can be
    excluded so the model matches a single evaluation split.
    """

    def __init__(self, config, allow_mixed_training=False, exclude_bearings=()):
        self.config = config
        self.service = AdjustmentService(allow_mixed_training)
        self.exclude_bearings = tuple(exclude_bearings)

    @property
    def store_path(self):
        return self.config.features_dir / store_filename(self.config.method, self.config.channel_set)

    @property
    def adjusted_path(self):
        return self.config.features_dir / 'adjusted' / store_filename(self.config.method, self.config.channel_set)

    @property
    def model_path(self):
        name = store_filename(self.config.method, self.config.channel_set).replace('.csv', '.adj')
        return self.config.features_dir / 'models' / name

    def select_training(self, matrix):
        keep = ~condition_mask(matrix, self.config.eval.test_conditions)
        if self.exclude_bearings:
            keep &= ~np.isin(np.asarray(matrix.bearing_id, dtype=str), self.exclude_bearings)
        if not keep.any():
            raise DataError("No rows left to train the adjustment on")
        return matrix.subset(np.flatnonzero(keep), role=ROLE_TRAIN)

    def run(self, model_path=None):
        if not Method(self.config.method).is_harmonic:
            logger.warning(f"Adjusting {self.config.method}, which is normally left unadjusted")

        matrix = read_store(self.store_path)
        if model_path:
            model = AdjustmentModel.load(model_path)
            logger.info(f"Applying saved adjustment model {model_path}")
        else:
            train = self.select_training(matrix)
            model = self.service.fit(train, trained_on=file_hash(self.store_path))
            model.save(self.model_path)

        adjusted = adjust_matrix(matrix, model)
        write_store(adjusted, self.adjusted_path)
        return model, adjusted
