"""Synthetic two-class dataset generator in the neutral recording format.

Channels sit on a ring and share a spatially low-pass background process, so
the estimated correlation graph has smooth low-frequency eigenvectors. Two
smooth ring patterns carry class-modulated variance: class 1 amplifies the
first and attenuates the second by (1 + separation), class 2 the reverse.
At separation 0 the classes are exchangeable; large separations concentrate
discriminative energy in the low end of the graph spectrum.

All randomness flows through one counter-based Philox stream, so a fixed
seed reproduces the dataset files byte for byte.
"""

import math

import numpy as np

from .dataio import save_recording
from .errors import ValidationError
from .preprocess import Marker, Recording

SAMPLE_RATE = 100
TRIAL_BLOCK = 350  # samples per cue block (3.5 s at 100 Hz)
HEAD_PAD = 100
TAIL_PAD = 100
DATASET_NAME = "synthetic"

_KERNEL_WIDTH = 0.7  # chordal-distance scale of the spatial mixing kernel
_PATTERN_GAIN = 0.8  # class-pattern amplitude relative to unit background
_SENSOR_NOISE = 0.5


def _ring_kernel(n_channels: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(n_channels) / n_channels
    chord = 2.0 * np.sin(np.abs(theta[:, None] - theta[None, :]) / 2.0)
    kernel = np.exp(-(chord**2) / (2.0 * _KERNEL_WIDTH**2))
    # unit background variance per channel
    return kernel / np.linalg.norm(kernel, axis=1, keepdims=True)


def _smooth_patterns(n_channels: int):
    theta = 2.0 * np.pi * np.arange(n_channels) / n_channels
    p = np.cos(theta)
    q = np.sin(theta)
    return p / np.linalg.norm(p), q / np.linalg.norm(q)


def generate_synthetic(
    seed: int,
    n_channels: int,
    n_trials_per_class: int,
    separation: float,
    out_dir,
    name: str = DATASET_NAME,
) -> Recording:
    """Write ``<out_dir>/<name>.{meta,f32,markers.csv}`` and return the recording.

    Half of each class's trials (rounded up, in temporal order) are tagged
    train, the rest test; test markers keep their true labels.
    """
    if separation < 0:
        raise ValidationError(f"separation must be >= 0, got {separation}")
    if n_channels < 4:
        raise ValidationError(f"need at least 4 channels, got {n_channels}")
    if n_trials_per_class < 2:
        raise ValidationError(f"need at least 2 trials per class, got {n_trials_per_class}")

    rng = np.random.Generator(np.random.Philox(seed))
    n_trials = 2 * n_trials_per_class
    total = HEAD_PAD + n_trials * TRIAL_BLOCK + TAIL_PAD

    # all train trials precede all test trials so that causal recording-scope
    # filtering can never carry test samples into train epochs
    train_per_class = math.ceil(n_trials_per_class / 2)
    test_per_class = n_trials_per_class - train_per_class
    labels = np.concatenate(
        [
            rng.permutation(np.repeat([1, 2], train_per_class)),
            rng.permutation(np.repeat([1, 2], test_per_class)),
        ]
    )
    splits = ["train"] * (2 * train_per_class) + ["test"] * (2 * test_per_class)
    kernel = _ring_kernel(n_channels)
    pattern_a, pattern_b = _smooth_patterns(n_channels)

    samples = kernel @ rng.standard_normal((n_channels, total))
    samples += _SENSOR_NOISE * rng.standard_normal((n_channels, total))

    boost = _PATTERN_GAIN * (1.0 + separation)
    damp = _PATTERN_GAIN / (1.0 + separation)
    markers = []
    for k in range(n_trials):
        label = int(labels[k])
        start = HEAD_PAD + k * TRIAL_BLOCK
        block = slice(start, start + TRIAL_BLOCK)
        gain_a, gain_b = (boost, damp) if label == 1 else (damp, boost)
        samples[:, block] += np.outer(pattern_a, gain_a * rng.standard_normal(TRIAL_BLOCK))
        samples[:, block] += np.outer(pattern_b, gain_b * rng.standard_normal(TRIAL_BLOCK))
        markers.append(Marker(cue_sample=start, label=label, split=splits[k]))

    rec = Recording(sample_rate=float(SAMPLE_RATE), samples=samples, markers=tuple(markers))
    save_recording(out_dir, name, rec)
    return rec
