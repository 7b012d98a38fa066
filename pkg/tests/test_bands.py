"""Spectral band resolution: thirds rule and cutoff modes.

Ground truth for N=118: ceil(118/3) = 40 and ceil(236/3) = 79, so
low = [1, 40], mid = [41, 79], high = [80, 118].
"""

import pytest

from graphmi.bands import SpectralBand, full_band, resolve_band
from graphmi.errors import BadCutoff, EmptyBand


class TestThirds:
    def test_n118_low(self):
        assert resolve_band("thirds_low", None, 118).range == (1, 40)

    def test_n118_mid(self):
        assert resolve_band("thirds_mid", None, 118).range == (41, 79)

    def test_n118_high(self):
        assert resolve_band("thirds_high", None, 118).range == (80, 118)

    def test_thirds_cover_everything_without_overlap(self):
        for n in (3, 4, 7, 9, 118, 128):
            low = resolve_band("thirds_low", None, n)
            mid = resolve_band("thirds_mid", None, n)
            high = resolve_band("thirds_high", None, n)
            assert low.lo == 1
            assert mid.lo == low.hi + 1
            assert high.lo == mid.hi + 1
            assert high.hi == n

    def test_sizes_balanced_within_one(self):
        for n in (6, 7, 8, 118):
            sizes = [resolve_band(m, None, n).size for m in ("thirds_low", "thirds_mid", "thirds_high")]
            assert max(sizes) - min(sizes) <= 1


class TestCutoffModes:
    def test_fixed_32(self):
        band = resolve_band("fixed_cutoff", 32, 118)
        assert band.range == (1, 32) and band.cutoff == 32

    def test_all(self):
        assert resolve_band("all", None, 118).range == (1, 118)

    def test_subject_specific(self):
        assert resolve_band("subject_specific", 47, 118).range == (1, 47)

    def test_cutoff_out_of_range(self):
        with pytest.raises(BadCutoff):
            resolve_band("fixed_cutoff", 0, 10)
        with pytest.raises(BadCutoff):
            resolve_band("fixed_cutoff", 11, 10)

    def test_cutoff_required(self):
        with pytest.raises(BadCutoff):
            resolve_band("fixed_cutoff", None, 10)

    def test_unknown_mode(self):
        with pytest.raises(BadCutoff):
            resolve_band("mystery", None, 10)


class TestSpectralBand:
    def test_full_band(self):
        band = full_band(17)
        assert band.range == (1, 17) and band.size == 17

    def test_empty_range_rejected(self):
        with pytest.raises(EmptyBand):
            SpectralBand(mode="all", range=(5, 4))
        with pytest.raises(EmptyBand):
            SpectralBand(mode="all", range=(0, 3))

    def test_degenerate_thirds(self):
        with pytest.raises(EmptyBand):
            resolve_band("thirds_mid", None, 1)
        with pytest.raises(EmptyBand):
            resolve_band("thirds_high", None, 2)
