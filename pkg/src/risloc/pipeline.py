"""One full localization trial: probing phase for directions, one steered
phase per estimated direction for delays, detection count, and mapping of
every (bearing, delay) pair to Cartesian coordinates.

Trials synthesize the receive-beamformed rows directly (path cascade
coefficient per epoch plus noise with the beamformer's variance), which is
distribution-exact and matches the composed per-epoch channel operations
bit-for-bit on noiseless scenes. A trial is deterministic given
(scenario, seed); noise is drawn in a fixed order: surface stage first when
enabled, then receiver stage, phase by phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    PathGains,
    Scenario,
    SnapshotMatrix,
    _complex_noise,
    draw_path_gains,
    pr_frame_angle,
    ris_path_angles_delays,
    steering_vector,
)
from .errors import (
    DegenerateGeometryError,
    InfeasibleDelayError,
    InvalidParameterError,
    NoSolutionError,
)
from .estimation import (
    average_epochs,
    count_targets,
    default_scan_grid,
    estimate_aoas,
    estimate_toas,
)
from .geometry import (
    SPEED_OF_LIGHT,
    SensingPair,
    bearing_deg,
    distance,
    map_to_position,
    wrap_angle_deg,
)
from .ris_control import (
    BeamWeights,
    ReflectionMatrix,
    cascade_response,
    directed_reflection_matrix,
    initial_reflection_matrix,
    pr_beamformer,
)
from .sequences import ZcSequence, generate_zc


@dataclass(frozen=True)
class EstimatorParams:
    """Thresholds, grids and heuristics of the estimation chain."""

    g_theta: float = 0.3
    g_tau: float = 0.3
    grid_step_deg: float = 0.1
    gate_guard_samples: float = 2.0
    aoa_floor_factor: float = 9.0
    aoa_merge_beamwidths: float = 1.8
    aoa_min_merge_deg: float = 0.5
    toa_merge_lags: int = 2
    max_candidates: int = 64
    aoa_method: str = "probing"

    def scan_grid(self) -> np.ndarray:
        return default_scan_grid(self.grid_step_deg)


@dataclass(frozen=True)
class TrialOutcome:
    """Ground truth and estimates of one Monte-Carlo trial."""

    true_positions: tuple[tuple[float, float], ...]
    estimated_positions: tuple[tuple[float, float], ...]
    k_true: int
    k_hat: int
    sensing_pairs: tuple[SensingPair, ...]
    seed: int
    k_theta: int = 0
    n_phases: int = 1
    mapping_failures: int = 0


def _scenario_frames(scenario: Scenario):
    """RIS-frame bearings of the transmitter and receiver, and the receive
    beamformer steered at the surface."""
    lay = scenario.layout
    theta_ap = wrap_angle_deg(bearing_deg(lay.p_ris, lay.p_ap) - lay.ris_boresight_deg)
    phi_pr = wrap_angle_deg(bearing_deg(lay.p_ris, lay.p_pr) - lay.ris_boresight_deg)
    for name, angle in (("transmitter", theta_ap), ("receiver", phi_pr)):
        if not -90.0 < angle < 90.0:
            raise InvalidParameterError(
                f"{name} sits outside the surface's frontal sector ({angle:.2f} deg)"
            )
    weights = pr_beamformer(pr_frame_angle(scenario, lay.p_ris), scenario.num_pr_antennas)
    return theta_ap, phi_pr, weights


def relay_gate_s(scenario: Scenario, guard_samples: float = 2.0) -> float:
    """Delay gate removing the target-free relay path plus a guard."""
    return scenario.layout.relay_path_m / SPEED_OF_LIGHT + guard_samples / scenario.f_samp


def beamformed_noise_power(scenario: Scenario, gains: PathGains, weights: BeamWeights) -> float:
    """Per-sample noise variance of the beamformed rows."""
    power = scenario.noise_variance * weights.noise_gain
    if scenario.ris_noise_variance > 0.0:
        power += (
            scenario.ris_noise_variance
            * scenario.num_ris_elements
            * abs(gains.rho_ris_pr) ** 2
        )
    return power


def capture_beamformed_phase(
    scenario: Scenario,
    zc: ZcSequence,
    gains: PathGains,
    reflection: ReflectionMatrix,
    weights: BeamWeights,
    rng: np.random.Generator | None,
) -> SnapshotMatrix:
    """Beamformed rows w^H Y for every epoch of one phase, shape (N_epoch, L).

    Integer-delay mode rounds each hop separately, matching the composed
    per-epoch channel route exactly.
    """
    lay = scenario.layout
    m = scenario.num_ris_elements
    s = zc.samples
    f = scenario.f_samp
    frac = scenario.use_fractional_delay
    phases = reflection.entries
    n_epochs = phases.shape[1]
    phi_pr = wrap_angle_deg(bearing_deg(lay.p_ris, lay.p_pr) - lay.ris_boresight_deg)
    tau_out = lay.d_ris_pr / SPEED_OF_LIGHT

    def fractional_delay(tau: float) -> np.ndarray:
        ramp = np.exp(-2j * np.pi * np.fft.fftfreq(s.shape[0]) * (tau * f))
        return np.fft.ifft(np.fft.fft(s) * ramp)

    def staged_delay(tau_in: float) -> np.ndarray:
        if frac:
            return fractional_delay(tau_in + tau_out)
        return np.roll(s, int(np.rint(tau_in * f)) + int(np.rint(tau_out * f)))

    def direct_delay(tau: float) -> np.ndarray:
        if frac:
            return fractional_delay(tau)
        return np.roll(s, int(np.rint(tau * f)))

    theta_ap = wrap_angle_deg(bearing_deg(lay.p_ris, lay.p_ap) - lay.ris_boresight_deg)
    paths = list(zip(ris_path_angles_delays(scenario), gains.alpha_targets))
    paths.append(((theta_ap, lay.d_ap_ris / SPEED_OF_LIGHT), gains.alpha_0))
    coeffs = np.empty((n_epochs, len(paths)), dtype=np.complex128)
    waveforms = np.empty((len(paths), s.shape[0]), dtype=np.complex128)
    for col, ((aoa, tau_in), alpha) in enumerate(paths):
        coeffs[:, col] = gains.rho_ris_pr * alpha * (phases.T @ cascade_response(phi_pr, aoa, m))
        waveforms[col] = staged_delay(tau_in)
    z = coeffs @ waveforms

    # Paths that bypass the surface arrive identically in every epoch.
    w = weights.w
    if scenario.blockage_ap:
        tau = distance(lay.p_ap, lay.p_pr) / SPEED_OF_LIGHT
        gain = gains.rho_ap_pr * np.vdot(
            w, steering_vector(scenario.num_pr_antennas, pr_frame_angle(scenario, lay.p_ap))
        )
        z += gain * direct_delay(tau)[None, :]
    for p, flag, rho in zip(scenario.targets, scenario.target_blockage, gains.rho_targets):
        if not flag:
            continue
        tau = (distance(lay.p_ap, p) + distance(p, lay.p_pr)) / SPEED_OF_LIGHT
        gain = rho * np.vdot(
            w, steering_vector(scenario.num_pr_antennas, pr_frame_angle(scenario, p))
        )
        z += gain * direct_delay(tau)[None, :]

    if scenario.ris_noise_variance > 0.0:
        if rng is None:
            raise InvalidParameterError("surface-stage noise requires an rng")
        z += gains.rho_ris_pr * _complex_noise(
            rng, z.shape, scenario.ris_noise_variance * m
        )
    if scenario.noise_variance > 0.0:
        if rng is None:
            raise InvalidParameterError("receiver noise requires an rng")
        z += _complex_noise(rng, z.shape, scenario.noise_variance * weights.noise_gain)
    return SnapshotMatrix(data=z, role="beamformed")


def run_trial(
    scenario: Scenario,
    params: EstimatorParams | None = None,
    seed: int | None = None,
) -> TrialOutcome:
    """Execute one localization trial and return estimates with ground truth.

    Phase 0 estimates the distinct arrival bearings; one steered phase per
    bearing estimates its delays; the detected count is the sum over
    directions; every (bearing, delay) pair maps to a position, with
    geometry failures counted instead of raised.
    """
    params = params or EstimatorParams()
    trial_seed = scenario.seed if seed is None else seed
    rng = np.random.default_rng(trial_seed)
    zc = generate_zc(scenario.zc_length, scenario.zc_root)
    gains = draw_path_gains(scenario, rng)
    theta_ap, phi_pr, weights = _scenario_frames(scenario)
    gate = relay_gate_s(scenario, params.gate_guard_samples)
    grid = params.scan_grid()

    probing = initial_reflection_matrix(
        theta_ap, phi_pr, scenario.num_ris_elements, scenario.n_epoch_aoa, rng
    )
    z0 = capture_beamformed_phase(scenario, zc, gains, probing, weights, rng)
    aoa = estimate_aoas(
        z0,
        probing,
        grid,
        params.g_theta,
        reference=zc,
        phi_ris_pr_deg=phi_pr,
        f_samp=scenario.f_samp,
        gate_s=gate,
        noise_power=beamformed_noise_power(scenario, gains, weights),
        floor_factor=params.aoa_floor_factor,
        merge_beamwidths=params.aoa_merge_beamwidths,
        min_merge_deg=params.aoa_min_merge_deg,
        max_candidates=params.max_candidates,
        method=params.aoa_method,
    )

    per_direction = []
    for q, theta_hat in enumerate(aoa.angles, start=1):
        steered = directed_reflection_matrix(
            theta_hat, phi_pr, scenario.num_ris_elements, scenario.n_epoch_toa, q
        )
        zq = capture_beamformed_phase(scenario, zc, gains, steered, weights, rng)
        per_direction.append(
            estimate_toas(
                average_epochs(zq),
                zc,
                params.g_tau,
                gate,
                scenario.f_samp,
                merge_lags=params.toa_merge_lags,
                direction_index=q,
            )
        )

    k_hat = count_targets(per_direction)
    positions: list[tuple[float, float]] = []
    pairs: list[SensingPair] = []
    failures = 0
    for theta_hat, toa in zip(aoa.angles, per_direction):
        for tau_hat in toa.delays:
            try:
                pair = SensingPair(aoa_deg=theta_hat, tau_s=tau_hat)
                positions.append(map_to_position(pair, scenario.layout))
                pairs.append(pair)
            except (InfeasibleDelayError, NoSolutionError, InvalidParameterError, DegenerateGeometryError):
                failures += 1

    return TrialOutcome(
        true_positions=tuple(tuple(p) for p in scenario.targets),
        estimated_positions=tuple(positions),
        k_true=len(scenario.targets),
        k_hat=k_hat,
        sensing_pairs=tuple(pairs),
        seed=trial_seed,
        k_theta=aoa.count,
        n_phases=1 + aoa.count,
        mapping_failures=failures,
    )
