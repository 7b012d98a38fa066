"""Stratified k-fold cross-validated cut-off search over the graph spectrum.

Fold assignment is a pure function of (seed, trial ids, labels): trials are
ordered by id within each class, permuted by a counter-based Philox stream
seeded once, and dealt round-robin over folds, so re-running reproduces the
same folds and accuracies bit for bit. The graph spectrum is taken as given
(computed once per subject from all training trials); covariances, projector
and classifier are re-fit inside every fold.
"""

from dataclasses import dataclass

import numpy as np

from .bands import MODE_FIXED, MODE_SUBJECT_SPECIFIC, SpectralBand, resolve_band
from .classify import extract_features, feature_transform, fit_linear_svm, predict_many
from .errors import (
    MissingClass,
    PipelineStageError,
    TooFewTrials,
    TraceUnderflow,
    ValidationError,
)
from .graph import GraphSpectrum
from .subspace import (
    ClassCovariancePair,
    TRACE_EPS,
    normalize_trial,
    simultaneous_diagonalize,
    truncate_band,
)


@dataclass(frozen=True)
class CvReport:
    """Mean CV accuracy per scanned cutoff index."""

    accuracies: dict  # cutoff index -> mean accuracy in [0, 1]
    best_cutoff: int
    folds: int
    seed: int

    def __post_init__(self):
        if not self.accuracies:
            raise ValidationError("empty CV report")
        if self.best_cutoff != _argmax_smallest(self.accuracies):
            raise ValidationError("best_cutoff is not the smallest argmax of accuracies")


def _argmax_smallest(accuracies: dict) -> int:
    best_k, best_v = None, -np.inf
    for k in sorted(accuracies):
        if accuracies[k] > best_v:
            best_k, best_v = k, accuracies[k]
    return best_k


def assign_folds(trials, folds: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold index per trial (position-aligned)."""
    labels = np.array([t.label for t in trials])
    rng = np.random.Generator(np.random.Philox(seed))
    fold_of = np.full(len(trials), -1, dtype=np.int64)
    dealt = 0  # continues across classes so no fold stays empty when folds > class size
    for label in (1, 2):
        positions = [i for i in range(len(trials)) if labels[i] == label]
        positions.sort(key=lambda i: trials[i].trial_id)
        for pos_idx in rng.permutation(len(positions)):
            fold_of[positions[pos_idx]] = dealt % folds
            dealt += 1
    return fold_of


def _check_cv_inputs(labeled, folds):
    n1 = sum(1 for t in labeled if t.label == 1)
    n2 = sum(1 for t in labeled if t.label == 2)
    if n1 < 2 or n2 < 2:
        raise TooFewTrials(f"need at least 2 labeled trials per class, got {n1} and {n2}")
    if folds < 2:
        raise TooFewTrials(f"folds must be >= 2, got {folds}")
    if folds > n1 + n2:
        raise TooFewTrials(f"folds={folds} exceeds the {n1 + n2} labeled trials")


def cv_scan(
    trials,
    spec: GraphSpectrum,
    folds: int = 10,
    seed: int = 42,
    cutoff_range: tuple | None = None,
    margin_cost: float = 1.0,
    rows_per_end: int = 1,
    log_features: bool = False,
    standardize_features: bool = False,
    rank_tol: float = 1e-10,
    allow_rank_reduction: bool = True,
) -> CvReport:
    """Mean CV accuracy for every cutoff in `cutoff_range` (inclusive).

    The default range is [2, N]; index 1 is degenerate because the first
    spectral coefficient is zeroed by the de-meaning step. Any subspace or
    classifier error inside a fold is re-raised annotated with (cutoff, fold).
    """
    labeled = [t for t in trials if t.label in (1, 2)]
    _check_cv_inputs(labeled, folds)
    n = spec.n_vertices
    lo, hi = cutoff_range if cutoff_range is not None else (2, n)
    if not 1 <= lo <= hi <= n:
        raise ValidationError(f"cutoff range [{lo}, {hi}] outside [1, {n}]")

    sts = [normalize_trial(t, spec) for t in labeled]
    raw_covs = [st.coeffs @ st.coeffs.T for st in sts]
    labels = np.array([t.label for t in labeled])
    fold_of = assign_folds(labeled, folds, seed)

    accuracies = {}
    for cutoff in range(lo, hi + 1):
        band = resolve_band(MODE_FIXED, cutoff, n)
        norm_slices = []
        for k, raw in enumerate(raw_covs):
            block = raw[:cutoff, :cutoff]
            tr = float(np.trace(block))
            if tr < TRACE_EPS:
                raise TraceUnderflow(
                    f"cutoff {cutoff}: trial {labeled[k].trial_id} has trace {tr:.3e}"
                )
            norm_slices.append(block / tr)
        norm_slices = np.stack(norm_slices)
        truncated = [truncate_band(st, band) for st in sts]

        fold_acc = np.zeros(folds)
        for fold in range(folds):
            train_mask = fold_of != fold
            test_mask = ~train_mask
            try:
                pair = _pair_from_slices(norm_slices, labels, train_mask)
                proj = simultaneous_diagonalize(pair, rank_tol, allow_rank_reduction)
                feats = np.stack(
                    [extract_features(st, proj, rows_per_end).values for st in truncated]
                )
                train_x, test_x = feature_transform(
                    feats[train_mask], feats[test_mask], log_features, standardize_features
                )
                model = fit_linear_svm(train_x, labels[train_mask], margin_cost)
                predicted = predict_many(model, test_x)
            except Exception as err:
                raise PipelineStageError(f"cv cutoff={cutoff} fold={fold}", err) from err
            fold_acc[fold] = float(np.mean(predicted == labels[test_mask]))
        accuracies[cutoff] = float(fold_acc.mean())

    return CvReport(
        accuracies=accuracies,
        best_cutoff=_argmax_smallest(accuracies),
        folds=folds,
        seed=seed,
    )


def _pair_from_slices(norm_slices, labels, train_mask) -> ClassCovariancePair:
    means = {}
    counts = {}
    for label in (1, 2):
        members = norm_slices[train_mask & (labels == label)]
        if members.shape[0] == 0:
            raise MissingClass(label)
        mean = members.mean(axis=0)
        means[label] = (mean + mean.T) / 2.0
        counts[label] = members.shape[0]
    return ClassCovariancePair(s1=means[1], s2=means[2], k1=counts[1], k2=counts[2])


def select_subject_specific(report: CvReport) -> SpectralBand:
    """Fixed band [1, best_cutoff] from a scan report."""
    return SpectralBand(
        mode=MODE_SUBJECT_SPECIFIC,
        range=(1, report.best_cutoff),
        cutoff=report.best_cutoff,
    )


def export_cv_report_csv(report: CvReport, path) -> None:
    """Scan curve as ``cutoff,mean_accuracy`` rows (ascending cutoff)."""
    with open(path, "w", newline="\n") as fh:
        fh.write("cutoff,mean_accuracy\n")
        for cutoff in sorted(report.accuracies):
            fh.write(f"{cutoff},{report.accuracies[cutoff]!r}\n")
