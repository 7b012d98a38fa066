"""Scikit-learn style estimators wrapping the functional core.

Trials are passed as 3-D arrays of shape (n_trials, n_channels, n_times)
with labels in {1, 2}; the blocks chain in a sklearn Pipeline:

    ConnectivitySpectrumTransform -> DiscriminativeProjectionTransform
        -> MaxMarginClassifier

or use `TrialClassifier` for the whole chain in one estimator.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .bands import resolve_band
from .classify import extract_features, feature_transform, fit_linear_svm, predict_many
from .graph import build_graph, spectrum
from .subspace import (
    SpectralTrial,
    class_covariances,
    normalize_trial,
    simultaneous_diagonalize,
    truncate_band,
)
from .validation import check_feature_matrix, check_labels, check_trial_stack


def _check_fitted(estimator, attr):
    if not hasattr(estimator, attr):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet")


class ConnectivitySpectrumTransform(BaseEstimator, TransformerMixin):
    """Learn the correlation graph and eigenbasis, emit banded GFT stacks.

    Parameters
    ----------
    band_mode : str
        One of all, thirds_low, thirds_mid, thirds_high, fixed_cutoff,
        subject_specific (the last two need `band_cutoff`).
    band_cutoff : int or None
        Upper eigenvalue index for the cutoff modes.
    """

    def __init__(self, band_mode="all", band_cutoff=None):
        self.band_mode = band_mode
        self.band_cutoff = band_cutoff

    def fit(self, X, y=None):
        X = check_trial_stack(X)
        self.graph_ = build_graph(list(X))
        self.spectrum_ = spectrum(self.graph_)
        self.band_ = resolve_band(self.band_mode, self.band_cutoff, self.spectrum_.n_vertices)
        return self

    def transform(self, X):
        _check_fitted(self, "spectrum_")
        X = check_trial_stack(X)
        out = [
            truncate_band(normalize_trial(trial, self.spectrum_), self.band_).coeffs
            for trial in X
        ]
        return np.stack(out)


class DiscriminativeProjectionTransform(BaseEstimator, TransformerMixin):
    """Fit the simultaneous-diagonalization projector, emit variance features.

    Rank reduction is on by default because stacks whose band starts at
    index 1 carry the structurally-zero first coefficient row.
    """

    def __init__(self, rows_per_end=1, rank_tol=1e-10, allow_rank_reduction=True):
        self.rows_per_end = rows_per_end
        self.rank_tol = rank_tol
        self.allow_rank_reduction = allow_rank_reduction

    def fit(self, X, y):
        X = check_trial_stack(X)
        y = check_labels(y, X.shape[0])
        trials = [
            SpectralTrial(coeffs=c, label=int(lbl), band=_stack_band(c))
            for c, lbl in zip(X, y)
        ]
        pair = class_covariances(trials)
        self.projector_ = simultaneous_diagonalize(
            pair, self.rank_tol, self.allow_rank_reduction
        )
        return self

    def transform(self, X):
        _check_fitted(self, "projector_")
        X = check_trial_stack(X)
        feats = [
            extract_features(
                SpectralTrial(coeffs=c, label=0, band=_stack_band(c)),
                self.projector_,
                self.rows_per_end,
            ).values
            for c in X
        ]
        return np.stack(feats)


def _stack_band(coeffs):
    # estimator stacks are positional; band bookkeeping restarts at index 1
    return resolve_band("fixed_cutoff", coeffs.shape[0], coeffs.shape[0])


class MaxMarginClassifier(BaseEstimator, ClassifierMixin):
    """Deterministic soft-margin linear SVM on feature matrices."""

    def __init__(self, margin_cost=1.0, log_features=False, standardize_features=False):
        self.margin_cost = margin_cost
        self.log_features = log_features
        self.standardize_features = standardize_features

    def fit(self, X, y):
        X = check_feature_matrix(X)
        y = check_labels(y, X.shape[0])
        self.train_x_ = X
        train_x, _ = feature_transform(X, X, self.log_features, self.standardize_features)
        self.model_ = fit_linear_svm(train_x, y, self.margin_cost)
        self.classes_ = np.array([1, 2])
        return self

    def decision_function(self, X):
        _check_fitted(self, "model_")
        X = check_feature_matrix(X)
        _, eval_x = feature_transform(
            self.train_x_, X, self.log_features, self.standardize_features
        )
        return eval_x @ self.model_.weights + self.model_.bias

    def predict(self, X):
        _check_fitted(self, "model_")
        X = check_feature_matrix(X)
        _, eval_x = feature_transform(
            self.train_x_, X, self.log_features, self.standardize_features
        )
        return predict_many(self.model_, eval_x)


class TrialClassifier(BaseEstimator, ClassifierMixin):
    """End-to-end trials-to-labels estimator combining all three stages."""

    def __init__(
        self,
        band_mode="all",
        band_cutoff=None,
        rows_per_end=1,
        margin_cost=1.0,
        log_features=False,
        standardize_features=False,
        rank_tol=1e-10,
        allow_rank_reduction=True,
    ):
        self.band_mode = band_mode
        self.band_cutoff = band_cutoff
        self.rows_per_end = rows_per_end
        self.margin_cost = margin_cost
        self.log_features = log_features
        self.standardize_features = standardize_features
        self.rank_tol = rank_tol
        self.allow_rank_reduction = allow_rank_reduction

    def fit(self, X, y):
        X = check_trial_stack(X)
        y = check_labels(y, X.shape[0])
        self.embedding_ = ConnectivitySpectrumTransform(
            band_mode=self.band_mode, band_cutoff=self.band_cutoff
        ).fit(X)
        stacks = self.embedding_.transform(X)
        self.projection_ = DiscriminativeProjectionTransform(
            rows_per_end=self.rows_per_end,
            rank_tol=self.rank_tol,
            allow_rank_reduction=self.allow_rank_reduction,
        ).fit(stacks, y)
        feats = self.projection_.transform(stacks)
        self.classifier_ = MaxMarginClassifier(
            margin_cost=self.margin_cost,
            log_features=self.log_features,
            standardize_features=self.standardize_features,
        ).fit(feats, y)
        self.classes_ = np.array([1, 2])
        return self

    def predict(self, X):
        _check_fitted(self, "classifier_")
        stacks = self.embedding_.transform(X)
        feats = self.projection_.transform(stacks)
        return self.classifier_.predict(feats)

    def decision_function(self, X):
        _check_fitted(self, "classifier_")
        stacks = self.embedding_.transform(X)
        feats = self.projection_.transform(stacks)
        return self.classifier_.decision_function(feats)
