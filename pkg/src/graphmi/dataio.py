"""Neutral on-disk recording format.

Three files per recording name:

* ``<name>.meta``        UTF-8 ``key=value`` lines: channels, sample_rate_hz, samples
* ``<name>.f32``         little-endian float32, time-major (sample 0 channels 0..N-1, ...)
* ``<name>.markers.csv`` header ``cue_sample,label,split``; label in {1,2,0}, split in {train,test}

The format is bit-exact: reading back what was written reproduces the float32
values exactly.
"""

import os

import numpy as np

from .errors import BadMarker, IoFailure, MalformedMeta, SizeMismatch
from .preprocess import Marker, Recording

META_KEYS = ("channels", "sample_rate_hz", "samples")
MARKER_HEADER = "cue_sample,label,split"


def _read_meta(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise IoFailure(f"cannot read {path}: {err}") from err
    values = {}
    for line in lines:
        if not line.strip():
            continue
        if "=" not in line:
            raise MalformedMeta(f"{path}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        try:
            values[key.strip()] = int(raw.strip())
        except ValueError as err:
            raise MalformedMeta(f"{path}: value for {key!r} is not an integer") from err
    missing = [k for k in META_KEYS if k not in values]
    if missing:
        raise MalformedMeta(f"{path}: missing keys {missing}")
    if values["channels"] <= 0 or values["sample_rate_hz"] <= 0 or values["samples"] <= 0:
        raise MalformedMeta(f"{path}: all meta values must be positive")
    return values


def _read_markers(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise IoFailure(f"cannot read {path}: {err}") from err
    if not lines or lines[0].strip() != MARKER_HEADER:
        raise BadMarker(f"{path}: first line must be {MARKER_HEADER!r}")
    markers = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise BadMarker(f"{path}:{i}: expected 3 fields, got {len(parts)}")
        try:
            cue = int(parts[0])
            label = int(parts[1])
        except ValueError as err:
            raise BadMarker(f"{path}:{i}: cue_sample and label must be integers") from err
        split = parts[2].strip()
        if label not in (0, 1, 2):
            raise BadMarker(f"{path}:{i}: label must be 0, 1 or 2, got {label}")
        if split not in ("train", "test"):
            raise BadMarker(f"{path}:{i}: split must be train or test, got {split!r}")
        markers.append(Marker(cue_sample=cue, label=label, split=split))
    return tuple(markers)


def load_recording(data_dir, name: str) -> Recording:
    """Load ``<data_dir>/<name>.{meta,f32,markers.csv}`` into a Recording."""
    base = os.path.join(str(data_dir), name)
    meta = _read_meta(base + ".meta")
    f32_path = base + ".f32"
    expected = meta["samples"] * meta["channels"]
    try:
        actual_bytes = os.path.getsize(f32_path)
    except OSError as err:
        raise IoFailure(f"cannot stat {f32_path}: {err}") from err
    if actual_bytes != expected * 4:
        raise SizeMismatch(
            f"{f32_path}: {actual_bytes} bytes, expected {expected * 4} "
            f"({meta['samples']} samples x {meta['channels']} channels x 4)"
        )
    raw = np.fromfile(f32_path, dtype="<f4")
    # time-major on disk -> (channels, samples) in memory
    data = raw.reshape(meta["samples"], meta["channels"]).T.astype(np.float64)
    markers = _read_markers(base + ".markers.csv")
    return Recording(sample_rate=float(meta["sample_rate_hz"]), samples=data, markers=markers)


def save_recording(data_dir, name: str, rec: Recording) -> None:
    """Write a Recording in the neutral format (values cast to float32)."""
    if rec.sample_rate != int(rec.sample_rate):
        raise IoFailure(f"neutral format stores integer sample rates, got {rec.sample_rate}")
    base = os.path.join(str(data_dir), name)
    try:
        os.makedirs(str(data_dir), exist_ok=True)
        with open(base + ".meta", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"channels={rec.n_channels}\n")
            fh.write(f"sample_rate_hz={int(rec.sample_rate)}\n")
            fh.write(f"samples={rec.n_samples}\n")
        rec.samples.T.astype("<f4").tofile(base + ".f32")
        with open(base + ".markers.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(MARKER_HEADER + "\n")
            for m in rec.markers:
                fh.write(f"{m.cue_sample},{m.label},{m.split}\n")
    except OSError as err:
        raise IoFailure(f"cannot write recording {name!r} to {data_dir}: {err}") from err
