"""
Operating condition adjustment.

Every feature gets its own degree-2 polynomial in shaft frequency a (Hz)
and load b (Nm), fitted by least squares on healthy rows. The intercept is
then zeroed, so subtracting the prediction removes the condition trend but
keeps the healthy baseline level and any fault-related offset.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from core.exceptions import DataError, IllConditionedDesignError, InvalidArgumentError

logger = logging.getLogger(__name__)

MONOMIAL_NAMES = ('1', 'a', 'b', 'a^2', 'ab', 'b^2')
N_MONOMIALS = len(MONOMIAL_NAMES)

# Relative threshold on the pivoted R diagonal below which a column is dependent
RANK_TOLERANCE = 1e-9

HEADER_PREFIX = '# harmspace-adjustment'
HEADER_RE = re.compile(
    r'^# harmspace-adjustment m=(?P<m>\d+) monomials=(?P<monomials>\S+) '
    r'trained_on=(?P<trained_on>\S*) healthy_only=(?P<healthy_only>true|false)$'
)


def make_condition_monomials(fo, to):
    """Rows [1, a, b, a^2, ab, b^2] for a = fo (Hz) and b = to (Nm)."""
    a = np.asarray(fo, dtype=float).ravel()
    b = np.asarray(to, dtype=float).ravel()
    if a.shape != b.shape:
        raise InvalidArgumentError(
            f"Speed and load vectors differ in length ({a.size} vs {b.size})"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidArgumentError("Operating conditions must be finite")
    return np.column_stack([np.ones_like(a), a, b, a * a, a * b, b * b])


@dataclass(frozen=True, eq=False)
class AdjustmentModel:
    """
    m x 6 coefficient matrix, column order MONOMIAL_NAMES.

    Column 0 is zero for any trained model.
    """
    coeffs: np.ndarray
    trained_on: str = ''
    healthy_only: bool = True

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != N_MONOMIALS:
            raise InvalidArgumentError(
                f"Coefficients must have shape (m, {N_MONOMIALS}), got {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise InvalidArgumentError("Adjustment coefficients must be finite")
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def n_features(self):
        return self.coeffs.shape[0]

    @classmethod
    def zeros(cls, m):
        return cls(np.zeros((m, N_MONOMIALS)))

    def predict(self, fo, to):
        """Condition trend per row and feature, n x m."""
        return make_condition_monomials(fo, to) @ self.coeffs.T

    def save(self, path):
        path = Path(path)
        lines = [
            f"{HEADER_PREFIX} m={self.n_features} monomials={','.join(MONOMIAL_NAMES)} "
            f"trained_on={self.trained_on} healthy_only={'true' if self.healthy_only else 'false'}"
        ]
        # repr gives the shortest string that parses back to the same double
        lines.extend(' '.join(repr(float(v)) for v in row) for row in self.coeffs)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text('\n'.join(lines) + '\n', encoding='ascii')
        except OSError as e:
            raise DataError(f"Could not write adjustment model {path}: {e}") from e
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            lines = path.read_text(encoding='ascii').splitlines()
        except OSError as e:
            raise DataError(f"Could not read adjustment model {path}: {e}") from e

        match = HEADER_RE.match(lines[0]) if lines else None
        if not match:
            raise DataError(f"{path} is not an adjustment model (bad header)")
        if tuple(match['monomials'].split(',')) != MONOMIAL_NAMES:
            raise DataError(f"{path} uses monomials {match['monomials']}, expected {','.join(MONOMIAL_NAMES)}")

        m = int(match['m'])
        rows = [line.split() for line in lines[1:] if line.strip()]
        if len(rows) != m or any(len(r) != N_MONOMIALS for r in rows):
            raise DataError(f"{path} should hold {m} rows of {N_MONOMIALS} coefficients")
        try:
            coeffs = np.array([[float(v) for v in r] for r in rows], dtype=float).reshape(m, N_MONOMIALS)
        except ValueError as e:
            raise DataError(f"{path} has a malformed coefficient: {e}") from e
        return cls(coeffs, trained_on=match['trained_on'], healthy_only=match['healthy_only'] == 'true')


def fit_adjustment(values, fo, to, trained_on='', healthy_only=True):
    """
    Least-squares fit of every feature column against the condition monomials.

    The design is scaled to unit max-abs per column and solved through a
    column-pivoted QR factorisation; all features share one factorisation.

    Raises:
        IllConditionedDesignError: Fewer than 6 independent monomial columns
    """
    H = np.asarray(values, dtype=float)
    if H.ndim != 2:
        raise InvalidArgumentError(f"Feature values must be 2-D, got shape {H.shape}")
    X = make_condition_monomials(fo, to)
    n = X.shape[0]
    if H.shape[0] != n:
        raise InvalidArgumentError(f"{H.shape[0]} feature rows for {n} condition rows")
    if n < N_MONOMIALS:
        raise IllConditionedDesignError(
            f"Need at least {N_MONOMIALS} rows to fit the adjustment, got {n}",
            monomials=MONOMIAL_NAMES[n:],
        )
    if not np.all(np.isfinite(H)):
        raise InvalidArgumentError("Feature values must be finite")

    scale = np.abs(X).max(axis=0)
    scale[scale == 0] = 1.0
    Q, R, piv = linalg.qr(X / scale, mode='economic', pivoting=True)

    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOLERANCE * diag[0])) if diag[0] > 0 else 0
    if rank < N_MONOMIALS:
        deficient = tuple(MONOMIAL_NAMES[j] for j in piv[rank:])
        raise IllConditionedDesignError(
            f"Condition design has rank {rank} < {N_MONOMIALS}; cannot resolve "
            f"monomials {', '.join(deficient)}. The training set needs more distinct "
            "speed/load combinations.",
            monomials=deficient,
        )

    beta = np.empty((N_MONOMIALS, H.shape[1]))
    beta[piv] = linalg.solve_triangular(R, Q.T @ H)
    coeffs = (beta / scale[:, None]).T
    coeffs[:, 0] = 0.0

    logger.debug(f"Fitted adjustment for {coeffs.shape[0]} features on {n} rows")
    return AdjustmentModel(coeffs, trained_on=trained_on, healthy_only=healthy_only)


def apply_adjustment(values, fo, to, model):
    """H - X @ A^T: subtract the condition trend predicted by ``model``."""
    H = np.asarray(values, dtype=float)
    if H.ndim != 2 or H.shape[1] != model.n_features:
        raise InvalidArgumentError(
            f"Feature matrix of shape {H.shape} does not match a model for "
            f"{model.n_features} features"
        )
    trend = model.predict(fo, to)
    if trend.shape[0] != H.shape[0]:
        raise InvalidArgumentError(f"{H.shape[0]} feature rows for {trend.shape[0]} condition rows")
    return H - trend


def fit_matrix(matrix, trained_on='', healthy_only=True):
    """fit_adjustment on a FeatureMatrix's values and conditions."""
    return fit_adjustment(matrix.values, matrix.fo, matrix.to, trained_on, healthy_only)


def adjust_matrix(matrix, model):
    """apply_adjustment on a FeatureMatrix; metadata passes through unchanged."""
    return matrix.with_values(apply_adjustment(matrix.values, matrix.fo, matrix.to, model))
