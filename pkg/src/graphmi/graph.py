"""Connectivity-graph construction, normalized Laplacian eigenbasis, and the
forward/inverse graph Fourier transform (GFT).

Conventions fixed here and relied on everywhere else:

* adjacency weights are absolute Pearson correlations in [0, 1], zero diagonal;
* the Laplacian is the symmetric normalized one, I - D^{-1/2} A D^{-1/2},
  whose spectrum lies in [0, 2];
* eigenvalues are sorted ascending and each eigenvector is sign-fixed so that
  its largest-magnitude entry is nonnegative (first such entry on ties), which
  makes the eigenbasis deterministic across calls.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EigenFailure, ValidationError, ZeroVarianceChannel
from .validation import (
    as_float_matrix,
    as_float_vector,
    check_length,
    check_square,
    check_symmetric,
    readonly,
)

SYMMETRY_TOL = 1e-12
DEGREE_EPS = 1e-12
EIGENVALUE_SLACK = 1e-9


@dataclass(frozen=True)
class ConnectivityGraph:
    """Symmetric weighted connectivity graph with its normalized Laplacian."""

    n_vertices: int
    adjacency: np.ndarray
    degrees: np.ndarray
    laplacian: np.ndarray

    @classmethod
    def from_adjacency(cls, adjacency) -> "ConnectivityGraph":
        """Validate an adjacency matrix and derive degrees and Laplacian.

        Requires a symmetric nonnegative matrix with zero diagonal, weights
        in [0, 1] and strictly positive degrees (any degree below 1e-12 is
        rejected rather than regularized).
        """
        adj = as_float_matrix(adjacency, "adjacency")
        n = check_square(adj, "adjacency")
        check_symmetric(adj, SYMMETRY_TOL, "adjacency")
        if np.any(np.diag(adj) != 0.0):
            raise ValidationError("adjacency diagonal must be exactly zero")
        if adj.min() < 0.0 or adj.max(initial=0.0) > 1.0:
            raise ValidationError("adjacency weights must lie in [0, 1]")
        adj = (adj + adj.T) / 2.0
        np.fill_diagonal(adj, 0.0)
        degrees = adj.sum(axis=1)
        if np.any(degrees < DEGREE_EPS):
            bad = int(np.argmin(degrees))
            raise ValidationError(f"vertex {bad} has degree {degrees[bad]:.3e} < {DEGREE_EPS}")
        d_inv_sqrt = 1.0 / np.sqrt(degrees)
        lap = -adj * d_inv_sqrt[:, None] * d_inv_sqrt[None, :]
        np.fill_diagonal(lap, 1.0)
        lap = (lap + lap.T) / 2.0
        return cls(
            n_vertices=n,
            adjacency=readonly(adj),
            degrees=readonly(degrees),
            laplacian=readonly(lap),
        )


@dataclass(frozen=True)
class GraphSpectrum:
    """Eigendecomposition of a normalized Laplacian, L = U diag(eigenvalues) U^T."""

    eigenvalues: np.ndarray  # ascending, in [0, 2] up to tolerance
    eigenvectors: np.ndarray  # orthonormal columns, sign-fixed

    @property
    def n_vertices(self) -> int:
        return self.eigenvalues.shape[0]


def build_graph(trials) -> ConnectivityGraph:
    """Build the connectivity graph from the temporal concatenation of trials.

    Edge weight (i, j) is the absolute Pearson correlation between channels
    i and j computed over all supplied trials' samples laid end to end.

    Parameters
    ----------
    trials : sequence of TrialMatrix or of (n_channels, n_times) arrays

    Raises
    ------
    DimensionMismatch : trials disagree on channel count
    ZeroVarianceChannel : some channel is constant over the concatenation
    """
    mats = [t.data if hasattr(t, "data") else as_float_matrix(t, "trial") for t in trials]
    if not mats:
        raise ValidationError("at least one trial is required to build a graph")
    n = mats[0].shape[0]
    for k, m in enumerate(mats):
        if m.shape[0] != n:
            raise DimensionMismatch(f"trial {k} has {m.shape[0]} channels, expected {n}")
    samples = np.concatenate(mats, axis=1)
    variances = samples.var(axis=1)
    if np.any(variances == 0.0):
        raise ZeroVarianceChannel(int(np.argmin(variances)))
    corr = np.corrcoef(samples)
    adj = np.abs(corr)
    np.fill_diagonal(adj, 0.0)
    np.clip(adj, 0.0, 1.0, out=adj)
    adj = (adj + adj.T) / 2.0
    return ConnectivityGraph.from_adjacency(adj)


def spectrum(graph: ConnectivityGraph) -> GraphSpectrum:
    """Full symmetric eigendecomposition of the normalized Laplacian.

    Eigenvalues come back ascending; each eigenvector is flipped so its
    largest-magnitude entry is nonnegative (lowest index wins ties), making
    repeated calls bit-identical.
    """
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(graph.laplacian)
    except np.linalg.LinAlgError as err:
        raise EigenFailure(f"symmetric eigensolver failed: {err}") from err
    # np.argmax returns the first maximal entry, which implements the tie rule.
    anchor = np.argmax(np.abs(eigenvectors), axis=0)
    signs = np.where(eigenvectors[anchor, np.arange(eigenvectors.shape[1])] < 0.0, -1.0, 1.0)
    eigenvectors = eigenvectors * signs[None, :]
    if eigenvalues[0] < -EIGENVALUE_SLACK or eigenvalues[-1] > 2.0 + EIGENVALUE_SLACK:
        raise EigenFailure(
            f"eigenvalues [{eigenvalues[0]:.3e}, {eigenvalues[-1]:.3e}] leave [0, 2] "
            "beyond tolerance; input is numerically pathological"
        )
    return GraphSpectrum(eigenvalues=readonly(eigenvalues), eigenvectors=readonly(eigenvectors))


def gft(spec: GraphSpectrum, signal) -> np.ndarray:
    """Forward GFT: project a vertex signal onto the eigenbasis (U^T f)."""
    f = as_float_vector(signal, "signal")
    check_length(f, spec.n_vertices, "signal")
    return spec.eigenvectors.T @ f


def igft(spec: GraphSpectrum, coeffs) -> np.ndarray:
    """Inverse GFT: synthesize a vertex signal from spectral coefficients (U f̂)."""
    c = as_float_vector(coeffs, "coeffs")
    check_length(c, spec.n_vertices, "coeffs")
    return spec.eigenvectors @ c


def _write_decimal_rows(path, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def export_adjacency_csv(graph: ConnectivityGraph, path) -> None:
    """One row per vertex, comma-separated decimal weights, no header, LF endings."""
    _write_decimal_rows(path, graph.adjacency)


def export_eigenvalues_csv(spec: GraphSpectrum, path) -> None:
    """One eigenvalue per row in ascending order, no header, LF endings."""
    _write_decimal_rows(path, [[v] for v in spec.eigenvalues])
