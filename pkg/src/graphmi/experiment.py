"""End-to-end experiments: load -> filter -> epoch -> graph -> spectrum ->
normalize -> band -> covariances -> projector -> features -> classifier ->
evaluation, with every learned quantity fit on the train split only.

Runs are deterministic: identical config and input bytes produce identical
result files, and the config digest recorded in every result makes that
checkable.
"""

import hashlib
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np

from . import bands as bands_mod
from .bands import MODE_SUBJECT_SPECIFIC, SpectralBand, resolve_band
from .classify import (
    LinearModel,
    extract_features,
    feature_transform,
    fit_linear_svm,
    predict_many,
)
from .crossval import CvReport, cv_scan, select_subject_specific
from .dataio import load_recording
from .errors import ConfigInvalid, GraphMIError, PipelineStageError
from .graph import ConnectivityGraph, GraphSpectrum, build_graph, spectrum
from .preprocess import (
    BandPassSpec,
    Recording,
    design_bandpass,
    epoch_trials,
    filter_recording,
    filter_trials,
)
from .subspace import (
    DiscriminativeProjector,
    class_covariances,
    normalize_trial,
    simultaneous_diagonalize,
    truncate_band,
)

FILTER_SCOPES = ("recording", "epoch")

BAND_LABELS = {
    "all": bands_mod.MODE_ALL,
    "lf": bands_mod.MODE_THIRDS_LOW,
    "mf": bands_mod.MODE_THIRDS_MID,
    "hf": bands_mod.MODE_THIRDS_HIGH,
    "ss": bands_mod.MODE_SUBJECT_SPECIFIC,
}


def parse_band_request(label: str):
    """CLI band vocabulary -> (mode, cutoff): all|lf|mf|hf|fixed:<k>|ss."""
    label = label.strip().lower()
    if label in BAND_LABELS:
        return BAND_LABELS[label], None
    if label.startswith("fixed:"):
        try:
            cutoff = int(label.split(":", 1)[1])
        except ValueError as err:
            raise ConfigInvalid(f"bad fixed band cutoff in {label!r}") from err
        return bands_mod.MODE_FIXED, cutoff
    raise ConfigInvalid(f"unknown band {label!r}; expected all|lf|mf|hf|fixed:<k>|ss")


@dataclass(frozen=True)
class ExperimentConfig:
    """Every knob of one experiment run; defaults follow the reference protocol."""

    data_dir: str
    subject: str
    band_mode: str = bands_mod.MODE_ALL
    band_cutoff: int | None = None
    rows_per_end: int = 1
    margin_cost: float = 1.0
    folds: int = 10
    seed: int = 42
    bandpass: BandPassSpec = field(default_factory=BandPassSpec)
    epoch_offset_s: float = 0.5
    epoch_length_s: float = 2.0
    filter_scope: str = "recording"
    zero_phase: bool = False
    log_features: bool = False
    standardize_features: bool = False
    # the de-meaning step zeroes the first spectral coefficient, so every
    # band starting at index 1 is structurally rank-deficient by one; the
    # pipeline therefore discards deficient directions by default while the
    # subspace operation itself stays strict
    allow_rank_reduction: bool = True
    rank_tol: float = 1e-10

    def __post_init__(self):
        if self.band_mode not in bands_mod.MODES:
            raise ConfigInvalid(f"unknown band mode {self.band_mode!r}")
        if self.filter_scope not in FILTER_SCOPES:
            raise ConfigInvalid(f"filter_scope must be one of {FILTER_SCOPES}")
        if self.rows_per_end < 1:
            raise ConfigInvalid(f"rows_per_end must be >= 1, got {self.rows_per_end}")
        if self.margin_cost <= 0:
            raise ConfigInvalid(f"margin_cost must be positive, got {self.margin_cost}")
        if self.folds < 2:
            raise ConfigInvalid(f"folds must be >= 2, got {self.folds}")
        if not self.subject:
            raise ConfigInvalid("subject must be non-empty")

    def digest(self) -> str:
        payload = {
            "data_dir": str(self.data_dir),
            "subject": self.subject,
            "band_mode": self.band_mode,
            "band_cutoff": self.band_cutoff,
            "rows_per_end": self.rows_per_end,
            "margin_cost": self.margin_cost,
            "folds": self.folds,
            "seed": self.seed,
            "bandpass": [self.bandpass.low_hz, self.bandpass.high_hz, self.bandpass.order],
            "epoch": [self.epoch_offset_s, self.epoch_length_s],
            "filter_scope": self.filter_scope,
            "zero_phase": self.zero_phase,
            "log_features": self.log_features,
            "standardize_features": self.standardize_features,
            "allow_rank_reduction": self.allow_rank_reduction,
            "rank_tol": self.rank_tol,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass(frozen=True)
class ExperimentResult:
    subject: str
    band: SpectralBand
    train_accuracy: float
    test_accuracy: float
    per_trial: tuple  # (trial_id, true_label, predicted) for every test trial
    config_hash: str

    def __post_init__(self):
        labeled = [(t, p) for _, t, p in self.per_trial if t in (1, 2)]
        if labeled:
            tally = sum(1 for t, p in labeled if t == p) / len(labeled)
            if abs(tally - self.test_accuracy) > 1e-12:
                raise ConfigInvalid("test_accuracy inconsistent with per-trial tallies")
        elif not math.isnan(self.test_accuracy):
            raise ConfigInvalid("test_accuracy must be NaN when no test trial is labeled")


@dataclass(frozen=True)
class FittedPipeline:
    """Everything learned from the train split, sufficient to classify trials."""

    config: ExperimentConfig
    graph: ConnectivityGraph
    spectrum: GraphSpectrum
    band: SpectralBand
    projector: DiscriminativeProjector
    model: LinearModel
    train_features: np.ndarray  # raw variance features of the train trials
    train_labels: np.ndarray
    scan_report: CvReport | None = None


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineStageError:
        raise
    except GraphMIError as err:
        raise PipelineStageError(name, err) from err


def prepare_trials(config: ExperimentConfig, recording: Recording | None = None):
    """Load, filter and epoch; returns (train_trials, test_trials)."""
    if recording is None:
        with _stage("load"):
            recording = load_recording(config.data_dir, config.subject)
    with _stage("filter-design"):
        coeffs = design_bandpass(config.bandpass, recording.sample_rate)
    if config.filter_scope == "recording":
        with _stage("filter"):
            recording = filter_recording(recording, coeffs, config.zero_phase)
        with _stage("epoch"):
            trials = epoch_trials(recording, config.epoch_offset_s, config.epoch_length_s)
    else:
        with _stage("epoch"):
            trials = epoch_trials(recording, config.epoch_offset_s, config.epoch_length_s)
        with _stage("filter"):
            trials = filter_trials(trials, coeffs, config.zero_phase)
    train = [t for t in trials if t.split == "train"]
    test = [t for t in trials if t.split == "test"]
    return train, test


def fit_pipeline(config: ExperimentConfig, train_trials) -> FittedPipeline:
    """Fit every stage on the supplied train trials only."""
    with _stage("graph"):
        graph = build_graph(train_trials)
    with _stage("spectrum"):
        spec = spectrum(graph)
    with _stage("normalize"):
        full = [normalize_trial(t, spec) for t in train_trials]
    scan_report = None
    if config.band_mode == MODE_SUBJECT_SPECIFIC and config.band_cutoff is None:
        with _stage("band-scan"):
            scan_report = cv_scan(
                train_trials,
                spec,
                folds=config.folds,
                seed=config.seed,
                margin_cost=config.margin_cost,
                rows_per_end=config.rows_per_end,
                log_features=config.log_features,
                standardize_features=config.standardize_features,
                rank_tol=config.rank_tol,
                allow_rank_reduction=config.allow_rank_reduction,
            )
            band = select_subject_specific(scan_report)
    else:
        with _stage("band"):
            band = resolve_band(config.band_mode, config.band_cutoff, spec.n_vertices)
    with _stage("covariances"):
        banded = [truncate_band(st, band) for st in full]
        pair = class_covariances(banded)
    with _stage("projector"):
        projector = simultaneous_diagonalize(pair, config.rank_tol, config.allow_rank_reduction)
    with _stage("features"):
        feats = np.stack(
            [extract_features(st, projector, config.rows_per_end).values for st in banded]
        )
        labels = np.array([t.label for t in train_trials], dtype=np.int64)
    with _stage("train"):
        train_x, _ = feature_transform(
            feats, feats, config.log_features, config.standardize_features
        )
        model = fit_linear_svm(train_x, labels, config.margin_cost)
    return FittedPipeline(
        config=config,
        graph=graph,
        spectrum=spec,
        band=band,
        projector=projector,
        model=model,
        train_features=feats,
        train_labels=labels,
        scan_report=scan_report,
    )


def classify_trials(fitted: FittedPipeline, trials) -> np.ndarray:
    """Predicted labels for already filtered+epoched trials."""
    config = fitted.config
    with _stage("evaluate"):
        feats = []
        for t in trials:
            st = truncate_band(normalize_trial(t, fitted.spectrum), fitted.band)
            feats.append(extract_features(st, fitted.projector, config.rows_per_end).values)
        _, eval_x = feature_transform(
            fitted.train_features,
            np.stack(feats),
            config.log_features,
            config.standardize_features,
        )
        return predict_many(fitted.model, eval_x)


def _accuracy(true_labels, predicted) -> float:
    known = np.asarray(true_labels) != 0
    if not known.any():
        return float("nan")
    return float(np.mean(np.asarray(predicted)[known] == np.asarray(true_labels)[known]))


def run_experiment(config: ExperimentConfig, recording: Recording | None = None) -> ExperimentResult:
    """Deterministic end-to-end run; test-split data never reaches fitting."""
    train, test = prepare_trials(config, recording)
    fitted = fit_pipeline(config, train)
    train_pred = classify_trials(fitted, train)
    train_acc = _accuracy([t.label for t in train], train_pred)
    if test:
        test_pred = classify_trials(fitted, test)
        per_trial = tuple(
            (t.trial_id, t.label, int(p)) for t, p in zip(test, test_pred)
        )
        test_acc = _accuracy([t.label for t in test], test_pred)
    else:
        per_trial = ()
        test_acc = float("nan")
    return ExperimentResult(
        subject=config.subject,
        band=fitted.band,
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        per_trial=per_trial,
        config_hash=config.digest(),
    )


def _fmt_acc(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.4f}"


def write_result_csv(result: ExperimentResult, path) -> None:
    """Summary row followed by a per-trial section; stable byte-for-byte."""
    with open(path, "w", newline="\n") as fh:
        fh.write("subject,band_mode,band_lo,band_hi,train_accuracy,test_accuracy,config_hash\n")
        fh.write(
            f"{result.subject},{result.band.mode},{result.band.lo},{result.band.hi},"
            f"{_fmt_acc(result.train_accuracy)},{_fmt_acc(result.test_accuracy)},"
            f"{result.config_hash}\n"
        )
        fh.write("\n")
        fh.write("trial_id,true_label,predicted\n")
        for trial_id, true_label, predicted in result.per_trial:
            fh.write(f"{trial_id},{true_label},{predicted}\n")


@dataclass(frozen=True)
class TableResult:
    subjects: tuple
    bands: tuple  # band request labels, e.g. ("all", "lf", "fixed:32")
    cells: dict  # (band_label, subject) -> test accuracy fraction
    failures: tuple  # (band_label, subject, message)


def mean_std(values) -> tuple:
    """Mean and sample (n-1) standard deviation; a single value has std 0."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1))


def run_table(config: ExperimentConfig, subjects, band_labels) -> TableResult:
    """Per-(subject, band) test accuracies; failures are isolated per cell."""
    cells = {}
    failures = []
    for band_label in band_labels:
        mode, cutoff = parse_band_request(band_label)
        for subject in subjects:
            cell_config = replace(
                config, subject=subject, band_mode=mode, band_cutoff=cutoff
            )
            try:
                result = run_experiment(cell_config)
                cells[(band_label, subject)] = result.test_accuracy
            except (GraphMIError, OSError) as err:
                failures.append((band_label, subject, str(err)))
    return TableResult(
        subjects=tuple(subjects),
        bands=tuple(band_labels),
        cells=cells,
        failures=tuple(failures),
    )


def write_table_csv(table: TableResult, path) -> None:
    """Accuracies as percentages, one row per band, mean +- sample std columns."""
    with open(path, "w", newline="\n") as fh:
        fh.write("band," + ",".join(table.subjects) + ",mean,std\n")
        for band_label in table.bands:
            row = [band_label]
            present = []
            for subject in table.subjects:
                acc = table.cells.get((band_label, subject))
                if acc is None or math.isnan(acc):
                    row.append("")
                else:
                    present.append(acc * 100.0)
                    row.append(f"{acc * 100.0:.4f}")
            mean, std = mean_std(present)
            row.append("" if math.isnan(mean) else f"{mean:.4f}")
            row.append("" if math.isnan(std) else f"{std:.4f}")
            fh.write(",".join(row) + "\n")
