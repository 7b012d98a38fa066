"""Cross-validated cutoff scan: fold determinism, stratification, and the
qualitative shape on data with known discriminative support.

Generator with known support: trials are synthesized in the spectral domain
as data = U @ coeffs where the class difference lives only in eigenvalue
indices 2..10, so accuracy must saturate once the cutoff covers index 10.
"""

import numpy as np
import pytest

from graphmi.crossval import (
    CvReport,
    assign_folds,
    cv_scan,
    export_cv_report_csv,
    select_subject_specific,
)
from graphmi.errors import TooFewTrials, ValidationError
from graphmi.graph import ConnectivityGraph, spectrum
from graphmi.preprocess import TrialMatrix
from graphmi.subspace import class_covariances, normalize_trial, simultaneous_diagonalize, truncate_band
from graphmi.bands import resolve_band
from graphmi.classify import extract_features, fit_linear_svm, predict_many


def random_spectrum(rng, n):
    w = rng.uniform(0.0, 1.0, size=(n, n))
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return spectrum(ConnectivityGraph.from_adjacency(w))


def planted_trials(rng, spec, n_per_class, t=60, support=range(1, 10), boost=4.0):
    """Vertex-domain trials whose class difference sits in `support` (0-based)."""
    n = spec.n_vertices
    rows = [i for i in support if i < n]
    trials = []
    for k in range(2 * n_per_class):
        label = 1 if k < n_per_class else 2
        coeffs = rng.standard_normal((n, t))
        coeffs[0] = 0.0
        gain = boost if label == 1 else 1.0 / boost
        coeffs[rows] *= gain
        data = spec.eigenvectors @ coeffs
        trials.append(TrialMatrix(data=data, label=label, trial_id=k))
    return trials


class TestAssignFolds:
    def make_trials(self, n1=7, n2=5):
        rng = np.random.default_rng(0)
        return [
            TrialMatrix(data=rng.standard_normal((3, 4)), label=1 if k < n1 else 2, trial_id=k)
            for k in range(n1 + n2)
        ]

    def test_deterministic_in_seed(self):
        trials = self.make_trials()
        a = assign_folds(trials, 3, seed=42)
        b = assign_folds(trials, 3, seed=42)
        c = assign_folds(trials, 3, seed=43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_stratified_within_one(self):
        trials = self.make_trials(n1=11, n2=8)
        folds = 4
        fold_of = assign_folds(trials, folds, seed=7)
        labels = np.array([t.label for t in trials])
        for label, count in ((1, 11), (2, 8)):
            per_fold = [np.sum((fold_of == f) & (labels == label)) for f in range(folds)]
            assert max(per_fold) - min(per_fold) <= 1
            assert sum(per_fold) == count

    def test_independent_of_input_order(self):
        trials = self.make_trials()
        shuffled = trials[::-1]
        a = assign_folds(trials, 3, seed=1)
        b = assign_folds(shuffled, 3, seed=1)
        by_id_a = {t.trial_id: f for t, f in zip(trials, a)}
        by_id_b = {t.trial_id: f for t, f in zip(shuffled, b)}
        assert by_id_a == by_id_b


class TestCvScan:
    def test_planted_support_saturates_early(self):
        rng = np.random.default_rng(42)
        spec = random_spectrum(rng, 24)
        trials = planted_trials(rng, spec, n_per_class=20)
        report = cv_scan(trials, spec, folds=5, seed=3)
        assert report.best_cutoff <= 15
        beyond = [report.accuracies[k] for k in range(12, 25)]
        assert min(beyond) >= 0.9  # flat and high once the support is covered
        early = report.accuracies[2]
        assert early <= min(beyond) + 0.1

    def test_identical_classes_near_chance(self):
        rng = np.random.default_rng(8)
        spec = random_spectrum(rng, 12)
        trials = planted_trials(rng, spec, n_per_class=20, boost=1.0)
        report = cv_scan(trials, spec, folds=4, seed=5, cutoff_range=(2, 8))
        for acc in report.accuracies.values():
            assert abs(acc - 0.5) <= 0.15

    def test_leave_one_out_runs(self):
        rng = np.random.default_rng(9)
        spec = random_spectrum(rng, 8)
        trials = planted_trials(rng, spec, n_per_class=4, t=30)
        report = cv_scan(trials, spec, folds=len(trials), seed=1, cutoff_range=(3, 5))
        assert report.folds == len(trials)
        assert set(report.accuracies) == {3, 4, 5}

    def test_scan_is_reproducible(self):
        rng = np.random.default_rng(10)
        spec = random_spectrum(rng, 10)
        trials = planted_trials(rng, spec, n_per_class=8, t=40)
        a = cv_scan(trials, spec, folds=4, seed=2, cutoff_range=(2, 6))
        b = cv_scan(trials, spec, folds=4, seed=2, cutoff_range=(2, 6))
        assert a.accuracies == b.accuracies and a.best_cutoff == b.best_cutoff

    def test_matches_naive_per_fold_recomputation(self):
        rng = np.random.default_rng(11)
        spec = random_spectrum(rng, 9)
        trials = planted_trials(rng, spec, n_per_class=6, t=30)
        folds, seed, cutoff = 3, 4, 5
        report = cv_scan(trials, spec, folds=folds, seed=seed, cutoff_range=(cutoff, cutoff))

        # independent recomputation through the public per-trial operations
        fold_of = assign_folds(trials, folds, seed)
        band = resolve_band("fixed_cutoff", cutoff, spec.n_vertices)
        sts = [truncate_band(normalize_trial(t, spec), band) for t in trials]
        labels = np.array([t.label for t in trials])
        accs = []
        for fold in range(folds):
            train = [st for st, f in zip(sts, fold_of) if f != fold]
            test = [st for st, f in zip(sts, fold_of) if f == fold]
            pair = class_covariances(train)
            proj = simultaneous_diagonalize(pair, allow_rank_reduction=True)
            train_x = np.stack([extract_features(st, proj).values for st in train])
            test_x = np.stack([extract_features(st, proj).values for st in test])
            model = fit_linear_svm(train_x, np.array([st.label for st in train]), 1.0)
            accs.append(np.mean(predict_many(model, test_x) == labels[fold_of == fold]))
        assert report.accuracies[cutoff] == pytest.approx(np.mean(accs), abs=1e-10)

    def test_too_few_trials(self):
        rng = np.random.default_rng(12)
        spec = random_spectrum(rng, 6)
        trials = planted_trials(rng, spec, n_per_class=1, t=20)
        with pytest.raises(TooFewTrials):
            cv_scan(trials, spec, folds=2)
        trials = planted_trials(rng, spec, n_per_class=3, t=20)
        with pytest.raises(TooFewTrials):
            cv_scan(trials, spec, folds=7)
        with pytest.raises(TooFewTrials):
            cv_scan(trials, spec, folds=1)


class TestCvReport:
    def test_best_must_be_smallest_argmax(self):
        with pytest.raises(ValidationError):
            CvReport(accuracies={3: 0.8, 5: 0.8}, best_cutoff=5, folds=2, seed=0)
        report = CvReport(accuracies={3: 0.8, 5: 0.8}, best_cutoff=3, folds=2, seed=0)
        assert report.best_cutoff == 3

    def test_select_subject_specific(self):
        report = CvReport(accuracies={20: 0.6, 47: 0.9, 80: 0.7}, best_cutoff=47, folds=10, seed=42)
        band = select_subject_specific(report)
        assert band.range == (1, 47) and band.mode == "subject_specific"

    def test_single_entry_report(self):
        report = CvReport(accuracies={9: 0.55}, best_cutoff=9, folds=2, seed=0)
        assert select_subject_specific(report).range == (1, 9)

    def test_export_csv(self, tmp_path):
        report = CvReport(accuracies={2: 0.5, 3: 0.75}, best_cutoff=3, folds=2, seed=0)
        path = tmp_path / "curve.csv"
        export_cv_report_csv(report, path)
        assert path.read_text() == "cutoff,mean_accuracy\n2,0.5\n3,0.75\n"
