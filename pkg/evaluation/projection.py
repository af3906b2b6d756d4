"""
Standardisation and PCA fitted on training rows only.
"""
from dataclasses import dataclass

import numpy as np
from sklearn.decomposition import PCA
from sklearn.preprocessing import StandardScaler

from core.exceptions import InvalidArgumentError
from features.matrix import ROLE_TRAIN


@dataclass(frozen=True, eq=False)
class Projection:
    feature_means: np.ndarray
    feature_stds: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    @property
    def n_features(self):
        return self.feature_means.size

    @property
    def constant_features(self):
        return self.feature_stds == 0

    def standardize(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.n_features:
            raise InvalidArgumentError(
                f"Rows of shape {values.shape} do not match a projection over "
                f"{self.n_features} features"
            )
        stds = np.where(self.constant_features, 1.0, self.feature_stds)
        z = (values - self.feature_means) / stds
        z[:, self.constant_features] = 0.0
        return z


def fit_projection(train, n_components=2):
    """
    Fit scaler and PCA on a train-role FeatureMatrix.

    Features with zero variance on the training rows are scaled to 0 for
    every row, so they never move a projected point.
    """
    if getattr(train, 'role', None) != ROLE_TRAIN:
        raise InvalidArgumentError("Projection statistics may only come from training rows")
    values = train.values
    if values.shape[0] < 3:
        raise InvalidArgumentError(f"Need at least 3 training rows, got {values.shape[0]}")

    scaler = StandardScaler().fit(values)
    stds = np.sqrt(scaler.var_)
    z = scaler.transform(values)
    constant = np.ptp(values, axis=0) == 0
    z[:, constant] = 0.0

    k = min(n_components, *values.shape)
    pca = PCA(n_components=k, svd_solver='full').fit(z)
    components = pca.components_.copy()
    components[:, constant] = 0.0

    return Projection(
        feature_means=scaler.mean_.copy(),
        feature_stds=np.where(constant, 0.0, stds),
        components=components,
        explained_variance=pca.explained_variance_.copy(),
    )


def project(p, rows):
    """((rows - means) / stds) @ components^T; accepts a FeatureMatrix or an array."""
    values = rows if isinstance(rows, np.ndarray) else rows.values
    return p.standardize(values) @ p.components.T
