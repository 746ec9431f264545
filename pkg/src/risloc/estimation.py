"""Direction and delay estimation from beamformed phase captures.

Directions (phase 0) are found by correlating, per epoch, the beamformed
capture against the known preamble, collecting candidate lags whose epoch
power clears a noise floor, and scanning each candidate's epoch response
against the known per-epoch surface response for every grid bearing. The
per-lag statistic is a correlation coefficient, so a matched noiseless
arrival scores exactly 1 while noise-only inputs stay far below the
threshold and can legitimately produce an empty result.

Delays (phases q > 0) come from a peak search over the peak-normalized
circular correlation of the epoch-averaged capture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .channel import SnapshotMatrix, steering_vector
from .errors import InvalidParameterError
from .ris_control import ReflectionMatrix
from .sequences import ZcSequence, center_series, cross_correlate


@dataclass(frozen=True)
class AoaEstimate:
    """Estimated arrival bearings (ascending, degrees) plus the scan spectrum."""

    angles: tuple[float, ...]
    spectrum: np.ndarray

    @property
    def count(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class ToaEstimate:
    """Qualifying delays (seconds, ascending) for one estimated direction."""

    delays: tuple[float, ...]
    direction_index: int

    @property
    def count(self) -> int:
        return len(self.delays)


def default_scan_grid(step_deg: float = 0.1, span_deg: float = 89.9) -> np.ndarray:
    """Uniform bearing grid covering (-span, span) inclusive."""
    n = int(round(span_deg / step_deg))
    return np.round(np.arange(-n, n + 1) * step_deg, 6)


def strict_local_maxima(values: np.ndarray, cyclic: bool = False) -> list[int]:
    """Indices of strict local maxima; plateau ties resolve to the lower index."""
    n = values.shape[0]
    if n == 0:
        return []
    if n == 1:
        return [0]
    peaks = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left = values[i - 1] if (i > 0 or cyclic) else -np.inf
        if cyclic and i == 0:
            left = values[-1]
        if j + 1 < n:
            right = values[j + 1]
        elif cyclic:
            right = values[0]
        else:
            right = -np.inf
        if values[i] > left and values[i] > right:
            # whole-array plateau has no strict neighbors; skip it
            if not (cyclic and i == 0 and j == n - 1):
                peaks.append(i)
        i = j + 1
    return peaks


def _select_peaks(indices, heights, positions, min_separation, period: float | None = None) -> list[int]:
    """Tallest-first selection with a minimum separation between survivors.

    `positions` maps each index to the coordinate the separation applies to
    and must be non-decreasing in index. With `period` set, separation is
    measured on the circle of that circumference (a steering manifold in
    sine space wraps with period 2: near-endfire bearings on opposite sides
    are nearly indistinguishable). Selection happens before any threshold,
    so raising a threshold afterwards can only shrink the result.
    """
    if not indices:
        return []
    order = sorted(indices, key=lambda ix: (-heights[ix], ix))
    sorted_ix = sorted(indices)
    pos = np.asarray([positions[ix] for ix in sorted_ix], dtype=float)
    rank = {ix: r for r, ix in enumerate(sorted_ix)}
    suppressed = np.zeros(len(sorted_ix), dtype=bool)
    kept: list[int] = []
    for ix in order:
        if suppressed[rank[ix]]:
            continue
        kept.append(ix)
        centers = [positions[ix]]
        if period is not None:
            centers += [positions[ix] - period, positions[ix] + period]
        for center in centers:
            lo = np.searchsorted(pos, center - min_separation, side="right")
            hi = np.searchsorted(pos, center + min_separation, side="left")
            suppressed[lo:hi] = True
    return sorted(kept)


def _epoch_correlations(rows: np.ndarray, reference: ZcSequence) -> np.ndarray:
    """Circular cross-correlation of every epoch row against the preamble."""
    rows = rows - rows.mean(axis=1, keepdims=True)
    ref_spec = np.conj(scipy.fft.fft(reference.samples))
    return scipy.fft.ifft(scipy.fft.fft(rows, axis=1) * ref_spec[None, :], axis=1)


def _candidate_lags(
    power: np.ndarray,
    gate_mask: np.ndarray,
    floor: float,
    max_candidates: int,
) -> list[int]:
    peaks = [ix for ix in strict_local_maxima(power, cyclic=True) if gate_mask[ix] and power[ix] > floor]
    kept = _select_peaks(peaks, power, np.arange(power.shape[0], dtype=float), 2.0)
    kept.sort(key=lambda ix: -power[ix])
    return sorted(kept[:max_candidates])


def _nlms_signature(epoch_phases: np.ndarray, beta: np.ndarray, mu: float = 0.5, passes: int = 8) -> np.ndarray:
    """Batch NLMS fit of the element-domain signature u with beta_n ~ v_n^T u."""
    m, n = epoch_phases.shape
    u = np.zeros(m, dtype=np.complex128)
    for _ in range(passes):
        for idx in range(n):
            v = epoch_phases[:, idx]
            err = beta[idx] - v @ u
            u = u + (mu / m) * np.conj(v) * err
    return u


def estimate_aoas(
    z0,
    v0,
    scan_grid_deg: np.ndarray,
    g_theta: float,
    *,
    reference: ZcSequence,
    phi_ris_pr_deg: float,
    f_samp: float,
    gate_s: float,
    noise_power: float = 0.0,
    floor_factor: float = 9.0,
    merge_beamwidths: float = 1.8,
    min_merge_deg: float = 0.5,
    max_candidates: int = 64,
    method: str = "probing",
) -> AoaEstimate:
    """Estimate distinct arrival bearings from the phase-0 capture.

    `noise_power` is the per-sample variance of the beamformed rows and sets
    the candidate-lag floor; `gate_s` removes the target-free relay delay
    from the candidate search. Returns an empty estimate when nothing clears
    the floor and threshold.
    """
    if not 0.0 < g_theta < 1.0:
        raise InvalidParameterError("g_theta must lie in (0, 1)")
    rows = z0.data if isinstance(z0, SnapshotMatrix) else np.asarray(z0)
    phases = v0.entries if isinstance(v0, ReflectionMatrix) else np.asarray(v0)
    if rows.shape[1] != reference.length:
        raise InvalidParameterError("capture length must match the preamble length")
    if phases.shape[1] != rows.shape[0]:
        raise InvalidParameterError("one phase column per epoch row is required")
    grid = np.asarray(scan_grid_deg, dtype=float)
    n_epochs, length = rows.shape
    num_elements = phases.shape[0]

    corr = _epoch_correlations(rows, reference)
    power = np.sum(np.abs(corr) ** 2, axis=0)
    lags = np.arange(length)
    gate_mask = lags / f_samp > gate_s
    floor = max(floor_factor * n_epochs * length * noise_power, 1e-6 * float(power.max()), 1e-300)
    candidates = _candidate_lags(power, gate_mask, floor, max_candidates)
    if not candidates:
        return AoaEstimate(angles=(), spectrum=np.zeros_like(grid))

    # Known per-epoch surface response toward every grid bearing.
    radiate = steering_vector(num_elements, phi_ris_pr_deg)
    grid_u = np.sin(np.radians(grid))
    manifold = np.exp(1j * np.pi * np.arange(num_elements)[:, None] * grid_u[None, :])
    cascade = radiate[:, None] * manifold  # (M, G)
    phases_c = np.conj(phases)
    epoch_gram = phases_c @ phases.T  # (M, M)
    gain_norm2 = np.sum(np.conj(cascade) * (epoch_gram @ cascade), axis=0).real
    gain_norm = np.sqrt(np.maximum(gain_norm2, 1e-300))

    spectrum = np.zeros(grid.shape[0])
    for lag in candidates:
        beta = corr[:, lag]
        beta_norm = float(np.linalg.norm(beta))
        if beta_norm == 0.0:
            continue
        if method == "probing":
            projected = phases_c @ beta  # (M,)
            numerator = np.abs(np.conj(cascade).T @ projected)
            rho = numerator / (gain_norm * beta_norm)
        elif method == "nlms":
            u = _nlms_signature(phases, beta)
            u_norm = float(np.linalg.norm(u))
            if u_norm == 0.0:
                continue
            rho = np.abs(np.conj(cascade).T @ u) / (np.linalg.norm(cascade, axis=0) * u_norm)
        else:
            raise InvalidParameterError(f"unknown direction-finding method: {method!r}")
        np.maximum(spectrum, rho, out=spectrum)

    peaks = strict_local_maxima(spectrum, cyclic=False)
    radius_u = max(merge_beamwidths * 2.0 / num_elements, 0.0)
    kept = _select_peaks(peaks, spectrum, grid_u, radius_u, period=2.0)
    # absolute angular merge for co-located bearings
    kept = _select_peaks(kept, spectrum, grid, min_merge_deg) if min_merge_deg > 0 else kept
    angles = tuple(float(grid[ix]) for ix in kept if spectrum[ix] > g_theta)
    return AoaEstimate(angles=tuple(sorted(angles)), spectrum=spectrum)


def average_epochs(z) -> np.ndarray:
    """Mean of the capture over epochs (rows)."""
    rows = z.data if isinstance(z, SnapshotMatrix) else np.asarray(z)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise InvalidParameterError("expected a non-empty 2-D epoch matrix")
    return rows.mean(axis=0)


def estimate_toas(
    z: np.ndarray,
    zc: ZcSequence,
    g_tau: float,
    gate_s: float,
    f_samp: float,
    merge_lags: int = 2,
    direction_index: int = 0,
) -> ToaEstimate:
    """Delays of qualifying correlation peaks for one steered direction.

    The profile is normalized to its own maximum, strict local maxima above
    `g_tau` survive (peaks closer than `merge_lags` merge into the larger),
    and any lag at or below the relay gate is discarded. An empty result is
    legitimate.
    """
    if not 0.0 < g_tau < 1.0:
        raise InvalidParameterError("g_tau must lie in (0, 1)")
    z = np.asarray(z)
    if z.shape[0] != zc.length:
        raise InvalidParameterError("test series length must match the preamble length")
    profile = cross_correlate(zc, center_series(z)).normalized
    peaks = strict_local_maxima(profile, cyclic=True)
    length = profile.shape[0]
    # cyclic merge: tallest peak claims every lag strictly within merge_lags
    order = sorted(peaks, key=lambda ix: (-profile[ix], ix))
    claimed = np.zeros(length, dtype=bool)
    kept: list[int] = []
    for ix in order:
        if claimed[ix]:
            continue
        kept.append(ix)
        for off in range(-(merge_lags - 1), merge_lags):
            claimed[(ix + off) % length] = True
    survivors = [ix for ix in sorted(kept) if profile[ix] > g_tau and ix / f_samp > gate_s]
    return ToaEstimate(
        delays=tuple(ix / f_samp for ix in survivors),
        direction_index=direction_index,
    )


def count_targets(per_direction) -> int:
    """Total detected targets across all steered directions."""
    return int(sum(est.count for est in per_direction))
