"""Variance features on the extreme projector rows and a linear max-margin
classifier.

The classifier minimizes ½||w||² + C·Σ hinge losses with an unregularized
bias. It is solved in the dual by sequential minimal optimization on the
maximal-violating pair, which keeps iteration order deterministic (first
index wins ties). The stopping tolerance is far below the 1e-6 duality-gap
contract so that re-solving an equivalent problem reproduces the decision
boundary to ~1e-8.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IoFailure,
    NonFiniteFeature,
    SingleClassInput,
    TrainingDidNotConverge,
    ValidationError,
)
from .validation import readonly
from .subspace import DiscriminativeProjector, SpectralTrial

KKT_TOL = 1e-12
GAP_CONTRACT = 1e-6
MAX_ITER = 10**6


@dataclass(frozen=True)
class FeatureVector:
    """Variances of the projected coefficients on the extreme rows."""

    values: np.ndarray  # (2 * rows_per_end,)
    label: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise NonFiniteFeature("feature values must be finite")
        if np.any(v < 0.0):
            raise ValidationError("variance features cannot be negative")
        object.__setattr__(self, "values", readonly(v))


@dataclass(frozen=True)
class LinearModel:
    """Linear decision rule sign(w·x + b); class 1 on ties."""

    weights: np.ndarray
    bias: float
    margin_cost: float


def extract_features(
    st: SpectralTrial, proj: DiscriminativeProjector, rows_per_end: int = 1
) -> FeatureVector:
    """Sample variances (T-1 denominator) of the first and last projector rows.

    Only the selected rows of Z = p_hat @ coeffs are formed; values are the
    first-rows variances followed by the last-rows variances. When the
    projector has reduced rank the two ends may select overlapping rows.
    """
    if st.coeffs.shape[0] != proj.dim:
        raise DimensionMismatch(
            f"trial band size {st.coeffs.shape[0]} does not match projector dim {proj.dim}"
        )
    if rows_per_end < 1 or 2 * rows_per_end > proj.dim or rows_per_end > proj.rank:
        raise DimensionMismatch(
            f"rows_per_end={rows_per_end} needs 2*{rows_per_end} <= dim {proj.dim} "
            f"and {rows_per_end} <= rank {proj.rank}"
        )
    sel = list(range(rows_per_end)) + list(range(proj.rank - rows_per_end, proj.rank))
    z = proj.p_hat[sel] @ st.coeffs
    return FeatureVector(values=z.var(axis=1, ddof=1), label=st.label)


def feature_transform(train_x, eval_x, log_features: bool = False, standardize: bool = False):
    """Optional log and train-set standardization applied to feature arrays.

    Raw variances are the default (the projection itself is the method's
    contribution); the log and zero-mean/unit-std switches exist because CSP
    practice often uses them. Standardization statistics come from the
    training set only.
    """
    train_x = np.asarray(train_x, dtype=np.float64)
    eval_x = np.asarray(eval_x, dtype=np.float64)
    if log_features:
        if np.any(train_x <= 0.0) or np.any(eval_x <= 0.0):
            raise NonFiniteFeature("log features require strictly positive variances")
        train_x = np.log(train_x)
        eval_x = np.log(eval_x)
    if standardize:
        mean = train_x.mean(axis=0)
        std = train_x.std(axis=0, ddof=0)
        std = np.where(std > 0.0, std, 1.0)
        train_x = (train_x - mean) / std
        eval_x = (eval_x - mean) / std
    return train_x, eval_x


def _features_to_arrays(features):
    if not features:
        raise SingleClassInput("no training features supplied")
    x = np.stack([np.asarray(fv.values, dtype=np.float64) for fv in features])
    y = np.array([fv.label for fv in features], dtype=np.int64)
    return x, y


def fit_linear_svm(x, y, margin_cost: float, tol: float = KKT_TOL) -> LinearModel:
    """Train on a plain feature matrix with labels in {1, 2}.

    This is the array-level entry point used by the pipeline after optional
    log/standardization transforms; `train_classifier` wraps it for
    FeatureVector inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"feature matrix {x.shape} does not match {y.shape[0]} labels")
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeature("training features must be finite")
    present = set(np.unique(y))
    if present != {1, 2}:
        raise SingleClassInput(f"need both classes 1 and 2 in training data, got {sorted(present)}")
    if margin_cost <= 0:
        raise ValidationError(f"margin_cost must be positive, got {margin_cost}")
    signs = np.where(y == 1, 1.0, -1.0)
    w, b, alpha = _smo(x, signs, float(margin_cost), tol)
    gap = _duality_gap(x, signs, float(margin_cost), alpha, w, b)
    if gap > GAP_CONTRACT:
        raise TrainingDidNotConverge(f"duality gap {gap:.3e} exceeds {GAP_CONTRACT}")
    if not np.any(w != 0.0):
        raise TrainingDidNotConverge("solver returned an all-zero weight vector")
    return LinearModel(weights=readonly(w), bias=float(b), margin_cost=float(margin_cost))


def train_classifier(features, margin_cost: float = 1.0) -> LinearModel:
    """Train the soft-margin linear classifier on variance features."""
    x, y = _features_to_arrays(list(features))
    return fit_linear_svm(x, y, margin_cost)


def _smo(x, signs, c, tol):
    """Maximal-violating-pair SMO for the dual SVM with bias constraint.

    Maintains w = Σ α_i y_i x_i and the slack gradient g_i = 1 - y_i w·x_i.
    The pair criterion y_i g_i is maximized over points that can grow and
    minimized over points that can shrink; optimality is reached when the
    two criteria cross within `tol`.
    """
    n = x.shape[0]
    gram = x @ x.T
    alpha = np.zeros(n)
    w = np.zeros(x.shape[1])
    g = np.ones(n)
    upper = np.where(signs > 0, c, 0.0)  # B_i: y_i alpha_i <= B_i
    lower = np.where(signs > 0, 0.0, -c)  # A_i: y_i alpha_i >= A_i
    y_alpha = np.zeros(n)
    iterations = 0
    while True:
        yg = signs * g
        can_grow = y_alpha < upper - 1e-15
        can_shrink = y_alpha > lower + 1e-15
        if not can_grow.any() or not can_shrink.any():
            break
        up = np.where(can_grow, yg, -np.inf)
        low = np.where(can_shrink, yg, np.inf)
        i = int(np.argmax(up))
        j = int(np.argmin(low))
        violation = up[i] - low[j]
        if violation <= tol:
            break
        if iterations >= MAX_ITER:
            raise TrainingDidNotConverge(
                f"KKT violation {violation:.3e} > {tol} after {MAX_ITER} pair updates"
            )
        eta = gram[i, i] + gram[j, j] - 2.0 * gram[i, j]
        step = min(upper[i] - y_alpha[i], y_alpha[j] - lower[j])
        if eta > 1e-14:
            step = min(step, violation / eta)
        if step <= 0.0:
            break
        alpha[i] += signs[i] * step
        alpha[j] -= signs[j] * step
        y_alpha[i] += step
        y_alpha[j] -= step
        w += step * (x[i] - x[j])
        g -= step * signs * (gram[:, i] - gram[:, j])
        iterations += 1
    interior = (alpha > 1e-12) & (alpha < c - 1e-12)
    yg = signs * g
    if interior.any():
        b = float(yg[interior].mean())
    else:
        hi = yg[y_alpha < upper - 1e-15]
        lo = yg[y_alpha > lower + 1e-15]
        top = hi.max() if hi.size else 0.0
        bot = lo.min() if lo.size else 0.0
        b = float((top + bot) / 2.0)
    return w, b, alpha


def _duality_gap(x, signs, c, alpha, w, b) -> float:
    margins = signs * (x @ w + b)
    primal = 0.5 * w @ w + c * np.maximum(0.0, 1.0 - margins).sum()
    dual = alpha.sum() - 0.5 * w @ w
    return float(primal - dual)


def predict(model: LinearModel, fv) -> int:
    """Classify one feature vector: decision >= 0 maps to class 1, else 2."""
    values = fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=np.float64)
    if values.shape != model.weights.shape:
        raise DimensionMismatch(
            f"feature length {values.shape} does not match model {model.weights.shape}"
        )
    return 1 if float(model.weights @ values + model.bias) >= 0.0 else 2


def decision_values(model: LinearModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.weights.shape[0]:
        raise DimensionMismatch(f"feature matrix {x.shape} does not match model")
    return x @ model.weights + model.bias


def predict_many(model: LinearModel, x) -> np.ndarray:
    return np.where(decision_values(model, x) >= 0.0, 1, 2)


def export_model(model: LinearModel, path) -> None:
    """One decimal per line: dimension, weights, bias, C; LF endings."""
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(model_to_text(model))
    except OSError as err:
        raise IoFailure(f"cannot write model to {path}: {err}") from err


def model_to_text(model: LinearModel) -> str:
    lines = [str(model.weights.shape[0])]
    lines.extend(repr(float(v)) for v in model.weights)
    lines.append(repr(float(model.bias)))
    lines.append(repr(float(model.margin_cost)))
    return "\n".join(lines) + "\n"


def import_model(path) -> LinearModel:
    try:
        with open(path, "r") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as err:
        raise IoFailure(f"cannot read model from {path}: {err}") from err
    return model_from_text("\n".join(lines) + "\n")


def model_from_text(text: str) -> LinearModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty model file")
    try:
        dim = int(lines[0])
        numbers = [float(v) for v in lines[1:]]
    except ValueError as err:
        raise ValidationError(f"malformed model file: {err}") from err
    if len(numbers) != dim + 2:
        raise ValidationError(f"model file declares dimension {dim} but has {len(numbers) - 2} weights")
    return LinearModel(
        weights=readonly(np.array(numbers[:dim])),
        bias=numbers[dim],
        margin_cost=numbers[dim + 1],
    )
