"""Spectral sub-band definitions over the graph-frequency index range.

Indices are 1-based and inclusive, matching eigenvalue positions 1..N in
ascending order. The thirds split of N uses ceilings:
low = [1, ceil(N/3)], mid = (ceil(N/3), ceil(2N/3)], high = (ceil(2N/3), N].
"""

import math
from dataclasses import dataclass

from .errors import BadCutoff, EmptyBand

MODE_ALL = "all"
MODE_THIRDS_LOW = "thirds_low"
MODE_THIRDS_MID = "thirds_mid"
MODE_THIRDS_HIGH = "thirds_high"
MODE_FIXED = "fixed_cutoff"
MODE_SUBJECT_SPECIFIC = "subject_specific"

MODES = (
    MODE_ALL,
    MODE_THIRDS_LOW,
    MODE_THIRDS_MID,
    MODE_THIRDS_HIGH,
    MODE_FIXED,
    MODE_SUBJECT_SPECIFIC,
)
CUTOFF_MODES = (MODE_FIXED, MODE_SUBJECT_SPECIFIC)


@dataclass(frozen=True)
class SpectralBand:
    """A resolved inclusive interval [lo, hi] of 1-based eigenvalue indices."""

    mode: str
    range: tuple  # (lo, hi)
    cutoff: int | None = None

    def __post_init__(self):
        lo, hi = self.range
        if lo < 1 or hi < lo:
            raise EmptyBand(f"band range [{lo}, {hi}] is empty or invalid")

    @property
    def lo(self) -> int:
        return self.range[0]

    @property
    def hi(self) -> int:
        return self.range[1]

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


def full_band(n_vertices: int) -> SpectralBand:
    return SpectralBand(mode=MODE_ALL, range=(1, n_vertices))


def resolve_band(mode: str, cutoff: int | None, n_vertices: int) -> SpectralBand:
    """Resolve a band request against the spectrum size.

    `cutoff` is required (and must lie in [1, N]) for the fixed and
    subject-specific modes, and ignored otherwise.
    """
    if n_vertices < 1:
        raise BadCutoff(f"spectrum size must be >= 1, got {n_vertices}")
    if mode not in MODES:
        raise BadCutoff(f"unknown band mode {mode!r}; expected one of {MODES}")
    if mode in CUTOFF_MODES:
        if cutoff is None:
            raise BadCutoff(f"mode {mode!r} requires a cutoff index")
        if not 1 <= cutoff <= n_vertices:
            raise BadCutoff(f"cutoff {cutoff} outside [1, {n_vertices}]")
        return SpectralBand(mode=mode, range=(1, cutoff), cutoff=cutoff)
    third = math.ceil(n_vertices / 3)
    two_thirds = math.ceil(2 * n_vertices / 3)
    if mode == MODE_ALL:
        return SpectralBand(mode=mode, range=(1, n_vertices))
    if mode == MODE_THIRDS_LOW:
        return SpectralBand(mode=mode, range=(1, third))
    if mode == MODE_THIRDS_MID:
        if two_thirds <= third:
            raise EmptyBand(f"middle third of {n_vertices} indices is empty")
        return SpectralBand(mode=mode, range=(third + 1, two_thirds))
    if two_thirds >= n_vertices:
        raise EmptyBand(f"high third of {n_vertices} indices is empty")
    return SpectralBand(mode=mode, range=(two_thirds + 1, n_vertices))
