"""Band-pass filtering of raw recordings and cue-locked trial epoching.

The filter is a Butterworth IIR band-pass obtained by bilinear transform with
frequency pre-warping, realized as a cascade of second-order sections (a
band-pass doubles the order, and direct-form IIR of order six is
ill-conditioned at low sample rates). Filtering is a single causal forward
pass with zero initial conditions by default; `zero_phase=True` switches to a
forward-backward pass.

Epoch boundaries use round-half-away-from-zero on sample indices so results
are bit-reproducible: the default 0.5 s offset / 2.0 s length window yields
exactly 200 columns at 100 Hz.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import (
    DimensionMismatch,
    EpochOutOfBounds,
    InvalidBand,
    NonFiniteOutput,
    ValidationError,
)
from .validation import as_float_matrix

TRAIN = "train"
TEST = "test"
UNLABELED = 0


@dataclass(frozen=True)
class Marker:
    """Cue onset position with its class label and train/test split tag."""

    cue_sample: int
    label: int  # 1, 2, or 0 for unlabeled
    split: str  # "train" or "test"


@dataclass(frozen=True)
class Recording:
    """Continuous multichannel recording with cue markers."""

    sample_rate: float
    samples: np.ndarray  # (n_channels, n_samples)
    markers: tuple

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be positive, got {self.sample_rate}")
        data = as_float_matrix(self.samples, "samples")
        object.__setattr__(self, "samples", data)
        object.__setattr__(self, "markers", tuple(self.markers))
        total = data.shape[1]
        for k, m in enumerate(self.markers):
            if not 0 <= m.cue_sample < total:
                raise ValidationError(f"marker {k} cue_sample {m.cue_sample} outside recording")
            if m.split not in (TRAIN, TEST):
                raise ValidationError(f"marker {k} split must be train or test, got {m.split!r}")
            if m.split == TRAIN and m.label not in (1, 2):
                raise ValidationError(f"train marker {k} must be labeled 1 or 2, got {m.label}")
            if m.label not in (0, 1, 2):
                raise ValidationError(f"marker {k} label must be in {{0, 1, 2}}, got {m.label}")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class TrialMatrix:
    """One trial's channels x time block with its label and split tag."""

    data: np.ndarray  # (n_channels, n_times)
    label: int
    trial_id: int
    split: str = TRAIN

    def __post_init__(self):
        object.__setattr__(self, "data", as_float_matrix(self.data, "trial data"))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_times(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BandPassSpec:
    """Pass-band edges in Hz and the per-edge Butterworth order."""

    low_hz: float = 8.0
    high_hz: float = 30.0
    order: int = 3

    def __post_init__(self):
        if self.order < 1:
            raise InvalidBand(f"order must be >= 1, got {self.order}")
        if not 0 < self.low_hz < self.high_hz:
            raise InvalidBand(f"need 0 < low_hz < high_hz, got ({self.low_hz}, {self.high_hz})")


@dataclass(frozen=True)
class FilterCoefficients:
    """Designed digital band-pass as second-order sections, tied to a sample rate."""

    sos: np.ndarray  # (n_sections, 6)
    sample_rate: float
    spec: BandPassSpec


def design_bandpass(spec: BandPassSpec, sample_rate: float) -> FilterCoefficients:
    """Design the digital Butterworth band-pass for the given sample rate.

    Raises InvalidBand when the upper edge reaches the Nyquist frequency.
    """
    if spec.high_hz >= sample_rate / 2.0:
        raise InvalidBand(
            f"high edge {spec.high_hz} Hz violates Nyquist for sample rate {sample_rate} Hz"
        )
    sos = sps.butter(
        spec.order, [spec.low_hz, spec.high_hz], btype="bandpass", fs=sample_rate, output="sos"
    )
    return FilterCoefficients(sos=sos, sample_rate=sample_rate, spec=spec)


def magnitude_response(coeffs: FilterCoefficients, freqs_hz) -> np.ndarray:
    """|H| of the designed filter at the given frequencies in Hz."""
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    w = 2.0 * np.pi * freqs / coeffs.sample_rate
    _, h = sps.sosfreqz(coeffs.sos, worN=w, fs=2.0 * np.pi)
    return np.abs(h)


def _apply(data: np.ndarray, coeffs: FilterCoefficients, zero_phase: bool) -> np.ndarray:
    if zero_phase:
        out = sps.sosfiltfilt(coeffs.sos, data, axis=1)
    else:
        out = sps.sosfilt(coeffs.sos, data, axis=1)
    if not np.all(np.isfinite(out)):
        raise NonFiniteOutput("filtering produced non-finite samples")
    return np.ascontiguousarray(out)


def filter_recording(
    rec: Recording, coeffs: FilterCoefficients, zero_phase: bool = False
) -> Recording:
    """Filter every channel independently; markers carry over unchanged."""
    if coeffs.sample_rate != rec.sample_rate:
        raise DimensionMismatch(
            f"filter designed for {coeffs.sample_rate} Hz, recording is {rec.sample_rate} Hz"
        )
    return Recording(
        sample_rate=rec.sample_rate,
        samples=_apply(rec.samples, coeffs, zero_phase),
        markers=rec.markers,
    )


def filter_trials(trials, coeffs: FilterCoefficients, zero_phase: bool = False):
    """Filter each already-epoched trial independently (per-epoch filter scope)."""
    return [
        TrialMatrix(
            data=_apply(t.data, coeffs, zero_phase),
            label=t.label,
            trial_id=t.trial_id,
            split=t.split,
        )
        for t in trials
    ]


def _round_half_away(x: float) -> int:
    # round-half-away-from-zero; x is never negative here
    return int(math.floor(x + 0.5))


def epoch_trials(rec: Recording, offset_s: float = 0.5, length_s: float = 2.0):
    """Cut one TrialMatrix per marker from the half-open window
    [cue + round(offset*fs), cue + round((offset+length)*fs)).

    Slicing is bit-exact: no transformation is applied to the values.
    """
    if offset_s < 0:
        raise ValidationError(f"offset_s must be >= 0, got {offset_s}")
    if length_s <= 0:
        raise ValidationError(f"length_s must be > 0, got {length_s}")
    fs = rec.sample_rate
    start_off = _round_half_away(offset_s * fs)
    stop_off = _round_half_away((offset_s + length_s) * fs)
    trials = []
    for k, m in enumerate(rec.markers):
        start = m.cue_sample + start_off
        stop = m.cue_sample + stop_off
        if start < 0 or stop > rec.n_samples:
            raise EpochOutOfBounds(k, f"marker {k}: window [{start}, {stop}) outside recording")
        trials.append(
            TrialMatrix(
                data=rec.samples[:, start:stop].copy(),
                label=m.label,
                trial_id=k,
                split=m.split,
            )
        )
    return trials
