"""Zadoff-Chu preamble generation and cyclic correlation analysis.

All correlations here are circular over one full period of length L, with the
lag convention that a sequence cyclically delayed by d samples produces its
correlation peak at lag d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class ZcSequence:
    """A constant-amplitude Zadoff-Chu sequence.

    Attributes
    ----------
    length : int
        Number of samples (odd).
    root : int
        Root index, coprime with `length`.
    samples : np.ndarray
        Complex unit-modulus samples, shape (length,).
    """

    length: int
    root: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        if self.length % 2 == 0 or self.length <= 0:
            raise InvalidParameterError(f"sequence length must be odd and positive, got {self.length}")
        if not (1 <= self.root < self.length):
            raise InvalidParameterError(f"root must lie in [1, {self.length - 1}], got {self.root}")
        if math.gcd(self.root, self.length) != 1:
            raise InvalidParameterError(
                f"root {self.root} is not coprime with length {self.length}"
            )


@dataclass(frozen=True)
class CorrelationProfile:
    """Magnitude of a circular cross-correlation, indexed by lag in samples.

    `normalization` is the profile's own peak, so `normalized` maps the
    largest peak to exactly 1 and every value into [0, 1].
    """

    magnitudes: np.ndarray
    normalization: float

    @property
    def normalized(self) -> np.ndarray:
        if self.normalization <= 0.0:
            return np.zeros_like(self.magnitudes)
        return self.magnitudes / self.normalization


def generate_zc(n_zc: int, root: int) -> ZcSequence:
    """Generate a Zadoff-Chu sequence of odd length `n_zc` with the given root.

    samples[m] = exp(-j*pi*root*m*(m+1)/n_zc), m = 0..n_zc-1.
    """
    if n_zc <= 0 or n_zc % 2 == 0:
        raise InvalidParameterError(f"n_zc must be odd and positive, got {n_zc}")
    if not (1 <= root < n_zc):
        raise InvalidParameterError(f"root must lie in [1, {n_zc - 1}], got {root}")
    if math.gcd(root, n_zc) != 1:
        raise InvalidParameterError(f"root {root} is not coprime with n_zc {n_zc}")
    m = np.arange(n_zc, dtype=np.float64)
    samples = np.exp(-1j * np.pi * root * m * (m + 1.0) / n_zc)
    return ZcSequence(length=n_zc, root=root, samples=samples)


def cyclic_autocorrelation(seq: ZcSequence, shift: int) -> float:
    """Magnitude of the circular autocorrelation at a single cyclic shift.

    Returns |sum_m s[m] * conj(s[(m - shift) mod N])|. Zero (to numerical
    precision) at every nonzero shift for a valid ZC sequence, N at shift 0.
    """
    if not (0 <= shift < seq.length):
        raise InvalidParameterError(f"shift must lie in [0, {seq.length - 1}], got {shift}")
    return float(np.abs(np.vdot(np.roll(seq.samples, shift), seq.samples)))


def cross_correlate(reference: ZcSequence, test: np.ndarray) -> CorrelationProfile:
    """Circular cross-correlation magnitude of `test` against `reference`.

    profile[lag] = |sum_n test[n] * conj(reference[(n - lag) mod L])| for all
    L lags, so a test sequence that is the reference cyclically delayed by d
    samples peaks at lag d. Computed in the frequency domain; matches the
    direct lag-domain sum to machine precision.
    """
    test = np.asarray(test)
    if test.ndim != 1 or test.shape[0] != reference.length:
        raise InvalidParameterError(
            f"test length {test.shape} does not match reference length {reference.length}"
        )
    spectrum = np.fft.fft(test) * np.conj(np.fft.fft(reference.samples))
    magnitudes = np.abs(np.fft.ifft(spectrum))
    return CorrelationProfile(magnitudes=magnitudes, normalization=float(magnitudes.max()))


def center_series(z: np.ndarray) -> np.ndarray:
    """Subtract the sample mean so the returned series is zero-mean."""
    z = np.asarray(z)
    if z.size == 0:
        raise InvalidParameterError("cannot center an empty series")
    return z - z.mean()
