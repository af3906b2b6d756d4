"""
Feature matrices and their on-disk store.

A FeatureMatrix keeps the n x m feature values together with per-row
metadata so rows never lose track of the recording they came from.
"""
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from core.exceptions import DataError, InvalidArgumentError
from core.models import HealthClass

METADATA_COLUMNS = ['bearing_id', 'class', 'speed_rpm', 'load_nm', 'run', 'segment']

ROLE_ANY = 'any'
ROLE_TRAIN = 'train'
ROLE_TEST = 'test'


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    bearing_id: np.ndarray
    label: np.ndarray
    speed_rpm: np.ndarray
    load_nm: np.ndarray
    run: np.ndarray
    segment: np.ndarray
    columns: tuple = field(default=())
    role: str = ROLE_ANY

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidArgumentError(f"Feature values must be 2-D, got shape {values.shape}")
        n = values.shape[0]
        for name in ('bearing_id', 'label', 'speed_rpm', 'load_nm', 'run', 'segment'):
            if len(getattr(self, name)) != n:
                raise InvalidArgumentError(
                    f"Metadata column '{name}' has {len(getattr(self, name))} rows, expected {n}"
                )
        if self.columns and len(self.columns) != values.shape[1]:
            raise InvalidArgumentError(
                f"{len(self.columns)} column labels for {values.shape[1]} features"
            )
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'speed_rpm', np.asarray(self.speed_rpm, dtype=float))
        object.__setattr__(self, 'load_nm', np.asarray(self.load_nm, dtype=float))

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_features(self):
        return self.values.shape[1]

    @property
    def fo(self):
        """Operating frequency in Hz."""
        return self.speed_rpm / 60.0

    @property
    def to(self):
        """Operating load in Nm."""
        return self.load_nm

    @property
    def condition_id(self):
        return list(zip(self.speed_rpm.tolist(), self.load_nm.tolist()))

    @property
    def is_healthy(self):
        return np.asarray(self.label) == HealthClass.HEALTHY

    def subset(self, rows, role=ROLE_ANY):
        rows = np.asarray(rows, dtype=int)
        return FeatureMatrix(
            values=self.values[rows],
            bearing_id=np.asarray(self.bearing_id)[rows],
            label=np.asarray(self.label)[rows],
            speed_rpm=self.speed_rpm[rows],
            load_nm=self.load_nm[rows],
            run=np.asarray(self.run)[rows],
            segment=np.asarray(self.segment)[rows],
            columns=self.columns,
            role=role,
        )

    def with_values(self, values):
        """Same rows and metadata, new feature values."""
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.n_rows:
            raise InvalidArgumentError(
                f"Replacement values have {values.shape[0]} rows, expected {self.n_rows}"
            )
        columns = self.columns if values.shape[1] == self.n_features else ()
        return replace(self, values=values, columns=columns)

    @classmethod
    def concatenate(cls, matrices):
        if not matrices:
            raise InvalidArgumentError("Nothing to concatenate")
        widths = {m.n_features for m in matrices}
        if len(widths) != 1:
            raise InvalidArgumentError(f"Feature widths differ between matrices: {sorted(widths)}")
        return cls(
            values=np.vstack([m.values for m in matrices]),
            bearing_id=np.concatenate([np.asarray(m.bearing_id) for m in matrices]),
            label=np.concatenate([np.asarray(m.label) for m in matrices]),
            speed_rpm=np.concatenate([m.speed_rpm for m in matrices]),
            load_nm=np.concatenate([m.load_nm for m in matrices]),
            run=np.concatenate([np.asarray(m.run) for m in matrices]),
            segment=np.concatenate([np.asarray(m.segment) for m in matrices]),
            columns=matrices[0].columns,
        )

    @classmethod
    def for_recording(cls, values, bearing_id, label, speed_rpm, load_nm, run, columns=()):
        """Rows of one recording, segments numbered from 0."""
        n = values.shape[0]
        return cls(
            values=values,
            bearing_id=np.full(n, bearing_id, dtype=object),
            label=np.full(n, str(label), dtype=object),
            speed_rpm=np.full(n, float(speed_rpm)),
            load_nm=np.full(n, float(load_nm)),
            run=np.full(n, int(run)),
            segment=np.arange(n),
            columns=tuple(columns),
        )

    def to_frame(self):
        meta = pd.DataFrame({
            'bearing_id': np.asarray(self.bearing_id, dtype=object),
            'class': np.asarray(self.label, dtype=object),
            'speed_rpm': self.speed_rpm,
            'load_nm': self.load_nm,
            'run': np.asarray(self.run, dtype=int),
            'segment': np.asarray(self.segment, dtype=int),
        })
        columns = list(self.columns) or [f"x{j}" for j in range(self.n_features)]
        features = pd.DataFrame(self.values, columns=columns)
        return pd.concat([meta, features], axis=1)

    @classmethod
    def from_frame(cls, frame):
        missing = [c for c in METADATA_COLUMNS if c not in frame.columns]
        if missing:
            raise DataError(f"Feature store is missing metadata columns: {', '.join(missing)}")
        feature_columns = [c for c in frame.columns if c not in METADATA_COLUMNS]
        return cls(
            values=frame[feature_columns].to_numpy(dtype=float),
            bearing_id=frame['bearing_id'].astype(str).to_numpy(dtype=object),
            label=frame['class'].astype(str).to_numpy(dtype=object),
            speed_rpm=frame['speed_rpm'].to_numpy(dtype=float),
            load_nm=frame['load_nm'].to_numpy(dtype=float),
            run=frame['run'].to_numpy(dtype=int),
            segment=frame['segment'].to_numpy(dtype=int),
            columns=tuple(feature_columns),
        )


def store_filename(method, channel_set):
    return f"{method}_{channel_set.replace('+', '-')}.csv"


def write_store(matrix, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        matrix.to_frame().to_csv(path, index=False)
    except OSError as e:
        raise DataError(f"Could not write feature store {path}: {e}") from e
    return path


def read_store(path):
    try:
        frame = pd.read_csv(path, dtype={'bearing_id': str, 'class': str})
    except FileNotFoundError:
        raise DataError(f"Feature store not found: {path}")
    except (OSError, pd.errors.ParserError) as e:
        raise DataError(f"Could not read feature store {path}: {e}") from e
    if frame.empty:
        raise DataError(f"Feature store is empty: {path}")
    return FeatureMatrix.from_frame(frame)
