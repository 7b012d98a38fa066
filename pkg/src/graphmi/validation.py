"""Input validation helpers shared by the functional core and the estimators."""

import numpy as np

from .errors import DimensionMismatch, NonFiniteFeature, ValidationError

VALID_LABELS = (0, 1, 2)  # 0 = unlabeled


def readonly(a: np.ndarray) -> np.ndarray:
    """Freeze an array in place; domain objects hand out immutable views."""
    a.setflags(write=False)
    return a


def as_float_matrix(a, name: str = "array") -> np.ndarray:
    """Coerce to a 2-D float64 array of finite values."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{name} contains non-finite values")
    return out


def as_float_vector(a, name: str = "vector") -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {out.shape}")
    return out


def check_length(v: np.ndarray, n: int, name: str = "vector") -> None:
    if v.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {n}")


def check_square(m: np.ndarray, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


def check_symmetric(m: np.ndarray, tol: float, name: str = "matrix") -> None:
    if np.abs(m - m.T).max(initial=0.0) > tol:
        raise ValidationError(f"{name} is not symmetric within {tol}")


def check_trial_stack(X, name: str = "X") -> np.ndarray:
    """Coerce to a 3-D (n_trials, n_channels, n_times) float64 array."""
    out = np.asarray(X, dtype=np.float64)
    if out.ndim != 3:
        raise DimensionMismatch(
            f"{name} must be 3-D (n_trials, n_channels, n_times), got shape {out.shape}"
        )
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{name} contains non-finite values")
    return out


def check_labels(y, n: int, name: str = "y") -> np.ndarray:
    out = np.asarray(y)
    if out.shape != (n,):
        raise DimensionMismatch(f"{name} must have shape ({n},), got {out.shape}")
    out = out.astype(np.int64)
    bad = set(np.unique(out)) - set(VALID_LABELS)
    if bad:
        raise ValidationError(f"{name} contains labels outside {{0, 1, 2}}: {sorted(bad)}")
    return out


def check_feature_matrix(X, name: str = "X") -> np.ndarray:
    out = np.asarray(X, dtype=np.float64)
    if out.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise NonFiniteFeature(f"{name} contains non-finite values")
    return out
