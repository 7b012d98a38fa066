"""Discriminative subspace construction in the graph spectral domain.

Per trial, every time sample (one graph signal per column) is de-meaned by
removing its component along the first Laplacian eigenvector, normalized to
unit energy, and expressed in the eigenbasis. Per class, the trial
covariances of these spectral matrices are trace-normalized and averaged.
A single transform then simultaneously diagonalizes the two class matrices:
whiten their sum S = S1 + S2 through its eigendecomposition S = Phi Theta Phi^T
(whitener P = Phi Theta^{-1/2}, so P^T S P = I), eigendecompose the whitened
S1 as Psi Theta1 Psi^T, and compose rows as p_hat = (P Psi)^T. Because the
whitened class matrices share eigenvectors with eigenvalues summing to one,
the first and last rows of p_hat are the most class-discriminative
directions.
"""

from dataclasses import dataclass

import numpy as np

from .bands import SpectralBand, full_band
from .errors import (
    DegenerateColumn,
    DimensionMismatch,
    EigenFailure,
    MissingClass,
    RankDeficient,
    TraceUnderflow,
    ValidationError,
)
from .graph import GraphSpectrum
from .validation import readonly

COLUMN_NORM_EPS = 1e-12
TRACE_EPS = 1e-14
DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class SpectralTrial:
    """GFT coefficient matrix of one de-meaned, normalized trial.

    Rows are eigenvalue indices in ascending order restricted to `band`;
    columns are time samples.
    """

    coeffs: np.ndarray  # (band.size, n_times)
    label: int
    band: SpectralBand

    def __post_init__(self):
        if self.coeffs.shape[0] != self.band.size:
            raise DimensionMismatch(
                f"coeffs have {self.coeffs.shape[0]} rows, band holds {self.band.size} indices"
            )

    @property
    def n_times(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class ClassCovariancePair:
    """Mean trace-normalized spectral covariance per class (each has trace 1)."""

    s1: np.ndarray
    s2: np.ndarray
    k1: int
    k2: int

    def __post_init__(self):
        for name, s in (("s1", self.s1), ("s2", self.s2)):
            if s.ndim != 2 or s.shape[0] != s.shape[1]:
                raise DimensionMismatch(f"{name} must be square, got {s.shape}")
            if np.abs(s - s.T).max(initial=0.0) > 1e-12:
                raise ValidationError(f"{name} is not symmetric within 1e-12")
            if abs(np.trace(s) - 1.0) > 1e-10:
                raise ValidationError(f"trace({name}) = {np.trace(s)!r}, expected 1")
        if self.s1.shape != self.s2.shape:
            raise DimensionMismatch("s1 and s2 differ in shape")

    @property
    def dim(self) -> int:
        return self.s1.shape[0]


@dataclass(frozen=True)
class DiscriminativeProjector:
    """Simultaneous-diagonalization transform with its eigenvalue ordering.

    Row i of `p_hat` carries class-1 whitened variance `theta1[i]`; theta1 is
    sorted descending, so row 0 favors class 1 and the last row favors
    class 2. `whitener` is the column whitener P of S1+S2 (P^T (S1+S2) P = I)
    and `rotation` the ordered eigenvector matrix Psi of the whitened S1.
    """

    p_hat: np.ndarray  # (rank, dim)
    theta1: np.ndarray  # (rank,), descending in [0, 1]
    whitener: np.ndarray  # (dim, rank)
    rotation: np.ndarray  # (rank, rank)

    @property
    def dim(self) -> int:
        return self.p_hat.shape[1]

    @property
    def rank(self) -> int:
        return self.p_hat.shape[0]


def normalize_trial(trial, spec: GraphSpectrum) -> SpectralTrial:
    """De-mean and normalize every column of a trial, then take its GFT.

    Column t maps to U^T (f - (u1^T f) u1) / ||f - (u1^T f) u1||. The output
    always covers the full band; truncation is a separate step.

    Raises DegenerateColumn(t) when a column is numerically a multiple of u1.
    """
    data = trial.data if hasattr(trial, "data") else np.asarray(trial, dtype=np.float64)
    n = spec.n_vertices
    if data.ndim != 2 or data.shape[0] != n:
        raise DimensionMismatch(f"trial has shape {data.shape}, spectrum expects {n} rows")
    u1 = spec.eigenvectors[:, 0]
    residual = data - np.outer(u1, u1 @ data)
    norms = np.linalg.norm(residual, axis=0)
    small = norms < COLUMN_NORM_EPS
    if np.any(small):
        raise DegenerateColumn(int(np.argmax(small)))
    coeffs = spec.eigenvectors.T @ (residual / norms)
    label = getattr(trial, "label", 0)
    return SpectralTrial(coeffs=readonly(coeffs), label=label, band=full_band(n))


def truncate_band(st: SpectralTrial, band: SpectralBand) -> SpectralTrial:
    """Keep the coefficient rows whose eigenvalue index falls in `band`.

    No renormalization is applied after truncation. The requested band must
    lie inside the band the trial currently carries.
    """
    if band.lo < st.band.lo or band.hi > st.band.hi:
        raise DimensionMismatch(
            f"band [{band.lo}, {band.hi}] not contained in trial band "
            f"[{st.band.lo}, {st.band.hi}]"
        )
    offset = st.band.lo
    rows = slice(band.lo - offset, band.hi - offset + 1)
    return SpectralTrial(coeffs=st.coeffs[rows], label=st.label, band=band)


def trial_covariance(st: SpectralTrial) -> np.ndarray:
    """Trace-normalized covariance F̂F̂ᵀ / tr(F̂F̂ᵀ) of one spectral trial."""
    raw = st.coeffs @ st.coeffs.T
    tr = float(np.trace(raw))
    if tr < TRACE_EPS:
        raise TraceUnderflow(f"trial covariance trace {tr:.3e} below {TRACE_EPS}")
    return raw / tr


def class_covariances(trials) -> ClassCovariancePair:
    """Average the trace-normalized trial covariances within each class.

    Unlabeled trials are ignored. All trials must share the band size.
    """
    trials = list(trials)
    if not trials:
        raise MissingClass(1)
    dim = trials[0].coeffs.shape[0]
    by_class = {1: [], 2: []}
    for st in trials:
        if st.coeffs.shape[0] != dim:
            raise DimensionMismatch("trials disagree on band size")
        if st.label in by_class:
            by_class[st.label].append(st)
    means = {}
    for label, members in by_class.items():
        if not members:
            raise MissingClass(label)
        stack = np.stack([trial_covariance(st) for st in members])
        mean = stack.mean(axis=0)
        means[label] = (mean + mean.T) / 2.0
    return ClassCovariancePair(
        s1=readonly(means[1]),
        s2=readonly(means[2]),
        k1=len(by_class[1]),
        k2=len(by_class[2]),
    )


def _sign_fix_rows(m: np.ndarray) -> np.ndarray:
    anchor = np.argmax(np.abs(m), axis=1)
    signs = np.where(m[np.arange(m.shape[0]), anchor] < 0.0, -1.0, 1.0)
    return m * signs[:, None]


def simultaneous_diagonalize(
    cov: ClassCovariancePair,
    rank_tol: float = DEFAULT_RANK_TOL,
    allow_rank_reduction: bool = False,
) -> DiscriminativeProjector:
    """Compute the transform whose rows diagonalize both class covariances.

    Eigenvalues of S1+S2 below `rank_tol` relative to the largest one make
    the whitening step singular; by default that raises RankDeficient with
    the offending indices, since silently dropping directions would change
    what the feature rows mean. With `allow_rank_reduction=True` those
    directions are discarded and the projector has reduced rank.
    """
    s_sum = cov.s1 + cov.s2
    try:
        theta, phi = np.linalg.eigh(s_sum)
    except np.linalg.LinAlgError as err:
        raise EigenFailure(f"eigendecomposition of summed covariance failed: {err}") from err
    threshold = rank_tol * theta[-1]
    deficient = np.nonzero(theta < threshold)[0]
    if deficient.size:
        if not allow_rank_reduction:
            raise RankDeficient(deficient.tolist())
        keep = theta >= threshold
        theta, phi = theta[keep], phi[:, keep]
    whitener = phi * (theta**-0.5)[None, :]  # P = Phi Theta^{-1/2}, so P^T S P = I
    whitened_s1 = whitener.T @ cov.s1 @ whitener
    whitened_s1 = (whitened_s1 + whitened_s1.T) / 2.0
    try:
        theta1, psi = np.linalg.eigh(whitened_s1)
    except np.linalg.LinAlgError as err:
        raise EigenFailure(f"eigendecomposition of whitened covariance failed: {err}") from err
    # stable argsort of the negated values: descending, ties keep ascending index
    order = np.argsort(-theta1, kind="stable")
    theta1 = np.clip(theta1[order], 0.0, 1.0)
    psi = psi[:, order]
    p_hat = _sign_fix_rows((whitener @ psi).T)
    return DiscriminativeProjector(
        p_hat=readonly(p_hat),
        theta1=readonly(theta1),
        whitener=readonly(whitener),
        rotation=readonly(psi),
    )


def export_projector_csv(proj: DiscriminativeProjector, path) -> None:
    """Write theta1 as the first row and p_hat row-major below it, no header."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(repr(float(v)) for v in proj.theta1))
        fh.write("\n")
        for row in proj.p_hat:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
