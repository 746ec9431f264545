import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risloc import (
    InvalidParameterError,
    center_series,
    cross_correlate,
    cyclic_autocorrelation,
    generate_zc,
)


def direct_cross_correlation(reference, test):
    """Lag-domain oracle: profile[k] = |sum_n test[n] * conj(ref[(n-k) % L])|."""
    ref = reference.samples
    length = ref.shape[0]
    out = np.empty(length)
    for lag in range(length):
        out[lag] = abs(np.sum(test * np.conj(np.roll(ref, lag))))
    return out


class TestGenerateZc:
    def test_first_sample_is_unity(self):
        seq = generate_zc(1989, 7)
        assert seq.samples[0] == pytest.approx(1.0 + 0.0j)

    def test_second_sample_matches_scalar_evaluation(self):
        seq = generate_zc(1989, 7)
        expected = cmath.exp(-1j * 14.0 * math.pi / 1989.0)
        assert seq.samples[1] == pytest.approx(expected, abs=1e-15)

    def test_constant_amplitude(self):
        seq = generate_zc(839, 3)
        np.testing.assert_allclose(np.abs(seq.samples), 1.0, atol=1e-12)
        seq = generate_zc(1989, 2)
        np.testing.assert_allclose(np.abs(seq.samples), 1.0, atol=1e-12)

    def test_non_coprime_root_rejected(self):
        with pytest.raises(InvalidParameterError):
            generate_zc(1989, 51)  # gcd(51, 1989) = 51

    def test_even_length_rejected(self):
        with pytest.raises(InvalidParameterError):
            generate_zc(1988, 7)

    @pytest.mark.parametrize("root", [0, 1989, 2000])
    def test_root_out_of_range_rejected(self, root):
        with pytest.raises(InvalidParameterError):
            generate_zc(1989, root)


class TestCyclicAutocorrelation:
    def test_zero_shift_equals_length(self):
        seq = generate_zc(1989, 7)
        assert cyclic_autocorrelation(seq, 0) == pytest.approx(1989.0)

    @pytest.mark.parametrize("shift", [5, 1988])
    def test_nonzero_shift_vanishes(self, shift):
        seq = generate_zc(1989, 7)
        assert cyclic_autocorrelation(seq, shift) < 1e-9 * seq.length

    def test_shift_out_of_range(self):
        seq = generate_zc(63, 5)
        with pytest.raises(InvalidParameterError):
            cyclic_autocorrelation(seq, 63)
        with pytest.raises(InvalidParameterError):
            cyclic_autocorrelation(seq, -1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=500))
    def test_cazac_property_random_parameters(self, draw):
        # sample a valid (odd length, coprime root) pair from the draw
        length = 2 * (draw % 220) + 3
        root = 1 + draw % (length - 1)
        if math.gcd(root, length) != 1:
            root = 1
        seq = generate_zc(length, root)
        shifts = np.arange(1, length)
        # brute-force all shifts at once through an independent roll-based sum
        mags = np.array([abs(np.vdot(np.roll(seq.samples, s), seq.samples)) for s in shifts])
        assert mags.max() < 1e-9 * length
        assert cyclic_autocorrelation(seq, 0) == pytest.approx(length)


class TestCrossCorrelate:
    def test_shifted_copy_peaks_at_shift(self):
        seq = generate_zc(1989, 7)
        test = np.roll(seq.samples, 37)
        profile = cross_correlate(seq, test)
        assert int(np.argmax(profile.magnitudes)) == 37
        others = np.delete(profile.magnitudes, 37)
        assert others.max() < 0.1 * profile.magnitudes[37]

    def test_unshifted_peak_at_zero_with_value_length(self):
        seq = generate_zc(1989, 7)
        profile = cross_correlate(seq, seq.samples)
        assert int(np.argmax(profile.magnitudes)) == 0
        assert profile.magnitudes[0] == pytest.approx(1989.0)

    def test_two_component_superposition(self):
        seq = generate_zc(1989, 7)
        test = 0.5 * np.roll(seq.samples, 10) + 0.5 * np.roll(seq.samples, 400)
        profile = cross_correlate(seq, center_series(test))
        mags = profile.magnitudes
        assert mags[10] >= 0.4 * seq.length
        assert mags[400] >= 0.4 * seq.length
        rest = np.delete(mags, [10, 400])
        assert rest.max() < 0.1 * seq.length

    def test_matches_direct_sum(self):
        seq = generate_zc(63, 5)
        rng = np.random.default_rng(1)
        test = rng.standard_normal(63) + 1j * rng.standard_normal(63)
        profile = cross_correlate(seq, test)
        oracle = direct_cross_correlation(seq, test)
        np.testing.assert_allclose(profile.magnitudes, oracle, rtol=1e-9, atol=1e-9)

    def test_length_mismatch_rejected(self):
        seq = generate_zc(63, 5)
        with pytest.raises(InvalidParameterError):
            cross_correlate(seq, np.ones(64, dtype=complex))

    def test_normalized_lies_in_unit_interval(self):
        seq = generate_zc(139, 3)
        rng = np.random.default_rng(7)
        test = rng.standard_normal(139) + 1j * rng.standard_normal(139)
        norm = cross_correlate(seq, test).normalized
        assert norm.min() >= 0.0
        assert norm.max() == pytest.approx(1.0)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=138))
    def test_shift_equivariance(self, extra):
        seq = generate_zc(139, 5)
        rng = np.random.default_rng(3)
        base = rng.standard_normal(139) + 1j * rng.standard_normal(139)
        ref_profile = cross_correlate(seq, base).magnitudes
        shifted_profile = cross_correlate(seq, np.roll(base, extra)).magnitudes
        np.testing.assert_allclose(np.roll(ref_profile, extra), shifted_profile, atol=1e-9 * 139)

    def test_linearity_of_superposed_shifts(self):
        seq = generate_zc(139, 5)
        a = np.roll(seq.samples, 20)
        b = np.roll(seq.samples, 90)
        combined = cross_correlate(seq, 0.7 * a + 0.3 * b).magnitudes
        assert combined[20] == pytest.approx(0.7 * 139, rel=1e-9)
        assert combined[90] == pytest.approx(0.3 * 139, rel=1e-9)


class TestCenterSeries:
    def test_constant_becomes_zero(self):
        out = center_series(np.full(10, 3.0 + 2.0j))
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_already_centered_unchanged(self):
        np.testing.assert_allclose(center_series(np.array([1.0, -1.0])), [1.0, -1.0])

    def test_complex_mean_removed(self):
        out = center_series(np.array([2 + 0j, 0 + 2j]))
        np.testing.assert_allclose(out, [1 - 1j, -1 + 1j])

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            center_series(np.array([]))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=64))
    def test_output_mean_is_zero(self, values):
        arr = np.asarray(values)
        out = center_series(arr)
        scale = max(1.0, np.abs(arr).max())
        assert abs(out.mean()) <= 1e-12 * scale
