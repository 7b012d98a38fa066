"""Graph-spectral discriminative-subspace classification of two-class
multichannel time-series trials."""

from .bands import SpectralBand, full_band, resolve_band
from .classify import (
    FeatureVector,
    LinearModel,
    extract_features,
    export_model,
    import_model,
    predict,
    train_classifier,
)
from .crossval import CvReport, cv_scan, export_cv_report_csv, select_subject_specific
from .dataio import load_recording, save_recording
from .errors import GraphMIError, IoError, NumericError, ValidationError
from .estimators import (
    ConnectivitySpectrumTransform,
    DiscriminativeProjectionTransform,
    MaxMarginClassifier,
    TrialClassifier,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    run_experiment,
    run_table,
    write_result_csv,
    write_table_csv,
)
from .graph import (
    ConnectivityGraph,
    GraphSpectrum,
    build_graph,
    export_adjacency_csv,
    export_eigenvalues_csv,
    gft,
    igft,
    spectrum,
)
from .preprocess import (
    BandPassSpec,
    Marker,
    Recording,
    TrialMatrix,
    design_bandpass,
    epoch_trials,
    filter_recording,
)
from .subspace import (
    ClassCovariancePair,
    DiscriminativeProjector,
    SpectralTrial,
    class_covariances,
    normalize_trial,
    simultaneous_diagonalize,
    truncate_band,
)
from .synthetic import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "BandPassSpec",
    "ClassCovariancePair",
    "ConnectivityGraph",
    "ConnectivitySpectrumTransform",
    "CvReport",
    "DiscriminativeProjectionTransform",
    "DiscriminativeProjector",
    "ExperimentConfig",
    "ExperimentResult",
    "FeatureVector",
    "GraphMIError",
    "GraphSpectrum",
    "IoError",
    "LinearModel",
    "Marker",
    "MaxMarginClassifier",
    "NumericError",
    "Recording",
    "SpectralBand",
    "SpectralTrial",
    "TrialClassifier",
    "TrialMatrix",
    "ValidationError",
    "build_graph",
    "class_covariances",
    "cv_scan",
    "design_bandpass",
    "epoch_trials",
    "export_adjacency_csv",
    "export_cv_report_csv",
    "export_eigenvalues_csv",
    "export_model",
    "extract_features",
    "filter_recording",
    "full_band",
    "generate_synthetic",
    "gft",
    "igft",
    "import_model",
    "load_recording",
    "normalize_trial",
    "predict",
    "resolve_band",
    "run_experiment",
    "run_table",
    "save_recording",
    "select_subject_specific",
    "simultaneous_diagonalize",
    "spectrum",
    "train_classifier",
    "truncate_band",
    "write_result_csv",
    "write_table_csv",
]
