"""Received-signal synthesis: steering vectors, path delays, channel gains,
blockage and AWGN at the reflecting surface and at the receive array.

The RIS and the receiver are modeled as half-wavelength uniform linear
arrays. Channel gains are unit magnitude with uniformly random phase per
trial; all attenuation is folded into the SNR knob. An optional free-space
two-hop attenuation mode can be enabled per scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .geometry import (
    SPEED_OF_LIGHT,
    NodeLayout,
    bearing_deg,
    distance,
    forward_sensing,
    wrap_angle_deg,
)

DEFAULT_SAMPLE_SPACING_M = 0.5
DEFAULT_F_SAMP = SPEED_OF_LIGHT / DEFAULT_SAMPLE_SPACING_M  # one sample ~ 0.5 m of path


@dataclass(frozen=True)
class Scenario:
    """Full description of one simulated capture: geometry, array sizes,
    epoch counts, noise levels and feature flags.

    `snr_db` sets unit signal power over per-sample complex noise variance at
    each receive antenna; None disables receiver noise entirely.
    `ris_snr_db` enables an optional independent noise process at the
    reflecting surface (off by default).
    """

    layout: NodeLayout
    targets: tuple[tuple[float, float], ...] = ()
    num_ris_elements: int = 64
    num_pr_antennas: int = 16
    n_epoch_aoa: int = 256
    n_epoch_toa: int = 16
    snr_db: float | None = 0.0
    f_samp: float = DEFAULT_F_SAMP
    zc_length: int = 1989
    zc_root: int = 7
    blockage_ap: int = 0
    blockage_targets: tuple[int, ...] = ()
    ris_snr_db: float | None = None
    use_fractional_delay: bool = False
    enable_pathloss: bool = False
    carrier_hz: float = 3.5e9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_ris_elements < 1 or self.num_pr_antennas < 1:
            raise InvalidParameterError("array sizes must be at least 1")
        if self.n_epoch_aoa < 1 or self.n_epoch_toa < 1:
            raise InvalidParameterError("epoch counts must be at least 1")
        if self.f_samp <= 0:
            raise InvalidParameterError("f_samp must be positive")
        if self.blockage_ap not in (0, 1):
            raise InvalidParameterError("blockage_ap must be 0 or 1")
        flags = self.blockage_targets
        if flags and len(flags) != len(self.targets):
            raise InvalidParameterError(
                f"blockage_targets has {len(flags)} entries for {len(self.targets)} targets"
            )
        if any(b not in (0, 1) for b in flags):
            raise InvalidParameterError("blockage_targets entries must be 0 or 1")
        for k, p in enumerate(self.targets):
            # forward_sensing raises for out-of-sector or degenerate placements
            pair = forward_sensing(p, self.layout)
            max_lag = self.zc_length - 2
            if pair.tau_s * self.f_samp > max_lag:
                raise InvalidParameterError(
                    f"target {k} at {p} exceeds the unambiguous delay window "
                    f"({pair.tau_s * self.f_samp:.1f} > {max_lag} samples)"
                )
            if not (0.0 <= p[0] <= self.layout.cell_width and 0.0 <= p[1] <= self.layout.cell_height):
                raise InvalidParameterError(f"target {k} at {p} lies outside the cell")

    @property
    def target_blockage(self) -> tuple[int, ...]:
        if self.blockage_targets:
            return self.blockage_targets
        return tuple(0 for _ in self.targets)

    @property
    def noise_variance(self) -> float:
        """Per-sample complex noise variance at each receive antenna."""
        if self.snr_db is None:
            return 0.0
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def ris_noise_variance(self) -> float:
        if self.ris_snr_db is None:
            return 0.0
        return 10.0 ** (-self.ris_snr_db / 10.0)

    def with_targets(self, targets, blockage=None) -> "Scenario":
        return replace(
            self,
            targets=tuple(tuple(p) for p in targets),
            blockage_targets=tuple(blockage) if blockage is not None else (),
        )


@dataclass(frozen=True)
class PathGains:
    """Complex gains of every modeled propagation path."""

    alpha_0: complex
    alpha_targets: tuple[complex, ...]
    rho_ris_pr: complex
    rho_ap_pr: complex
    rho_targets: tuple[complex, ...]


@dataclass(frozen=True)
class SnapshotMatrix:
    """One phase's sampled data block: rows are epochs (or antennas)."""

    data: np.ndarray
    role: str = "pr_raw"

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise InvalidParameterError("snapshot data must be a 2-D matrix")
        if not np.all(np.isfinite(self.data)):
            raise InvalidParameterError("snapshot data contains non-finite entries")


def steering_vector(num_elements: int, theta_deg: float) -> np.ndarray:
    """Half-wavelength ULA response toward a bearing in (-90, 90) degrees.

    Element i carries phase exp(j*pi*i*sin(theta)).
    """
    if num_elements < 1:
        raise InvalidParameterError("num_elements must be at least 1")
    if not -90.0 < theta_deg < 90.0:
        raise InvalidParameterError(f"theta must lie in the open (-90, 90), got {theta_deg}")
    i = np.arange(num_elements)
    return np.exp(1j * np.pi * i * math.sin(math.radians(theta_deg)))


def delay_signal(s: np.ndarray, tau_s: float, f_samp: float, fractional: bool = False) -> np.ndarray:
    """Cyclically delay a one-period signal by tau seconds.

    Integer mode shifts by round(tau * f_samp) samples. Fractional mode
    applies a frequency-domain phase ramp, exact for cyclic signals and
    band-limited in between samples.
    """
    s = np.asarray(s)
    if tau_s < 0:
        raise InvalidParameterError("delay must be non-negative")
    if not fractional:
        return np.roll(s, int(np.rint(tau_s * f_samp)))
    length = s.shape[-1]
    ramp = np.exp(-2j * np.pi * np.fft.fftfreq(length) * (tau_s * f_samp))
    return np.fft.ifft(np.fft.fft(s) * ramp)


def _free_space_amplitude(dist_m: float, wavelength_m: float) -> float:
    return wavelength_m / (4.0 * math.pi * max(dist_m, 1e-3))


def draw_path_gains(scenario: Scenario, rng: np.random.Generator) -> PathGains:
    """Draw per-trial path gains: unit magnitude, uniform random phase.

    With `enable_pathloss` the magnitudes follow a free-space amplitude per
    hop at the configured carrier instead of staying at 1.
    """
    lay = scenario.layout
    k = len(scenario.targets)
    phases = np.exp(2j * np.pi * rng.random(3 + 2 * k))
    if scenario.enable_pathloss:
        lam = SPEED_OF_LIGHT / scenario.carrier_hz
        amp_0 = _free_space_amplitude(lay.d_ap_ris, lam)
        amp_rp = _free_space_amplitude(lay.d_ris_pr, lam)
        amp_ap_pr = _free_space_amplitude(distance(lay.p_ap, lay.p_pr), lam)
        amp_t = [
            _free_space_amplitude(distance(lay.p_ap, p), lam)
            * _free_space_amplitude(distance(p, lay.p_ris), lam)
            for p in scenario.targets
        ]
        amp_tp = [
            _free_space_amplitude(distance(lay.p_ap, p), lam)
            * _free_space_amplitude(distance(p, lay.p_pr), lam)
            for p in scenario.targets
        ]
    else:
        amp_0 = amp_rp = amp_ap_pr = 1.0
        amp_t = [1.0] * k
        amp_tp = [1.0] * k
    return PathGains(
        alpha_0=complex(amp_0 * phases[0]),
        rho_ris_pr=complex(amp_rp * phases[1]),
        rho_ap_pr=complex(amp_ap_pr * phases[2]),
        alpha_targets=tuple(complex(a * p) for a, p in zip(amp_t, phases[3 : 3 + k])),
        rho_targets=tuple(complex(a * p) for a, p in zip(amp_tp, phases[3 + k :])),
    )


def _complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def ris_path_angles_delays(scenario: Scenario):
    """Per-target (aoa_deg at the RIS, AP->target->RIS delay in seconds)."""
    lay = scenario.layout
    out = []
    for p in scenario.targets:
        pair = forward_sensing(p, lay)
        inbound = (distance(lay.p_ap, p) + distance(p, lay.p_ris)) / SPEED_OF_LIGHT
        out.append((pair.aoa_deg, inbound))
    return out


def synthesize_ris_signal(
    scenario: Scenario,
    zc,
    gains: PathGains,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Impinging signal at the reflecting surface, shape (M, L).

    Sum of the target bounce paths and the direct transmitter path, each a
    steering vector times a delayed copy of the preamble. Optional
    surface-stage noise is added when the scenario enables it.
    """
    m = scenario.num_ris_elements
    s = zc.samples
    lay = scenario.layout
    r = np.zeros((m, s.shape[0]), dtype=np.complex128)
    for (aoa, tau_in), alpha in zip(ris_path_angles_delays(scenario), gains.alpha_targets):
        delayed = delay_signal(s, tau_in, scenario.f_samp, scenario.use_fractional_delay)
        r += alpha * np.outer(steering_vector(m, aoa), delayed)
    theta_ap = wrap_angle_deg(bearing_deg(lay.p_ris, lay.p_ap) - lay.ris_boresight_deg)
    tau_ap = lay.d_ap_ris / SPEED_OF_LIGHT
    delayed = delay_signal(s, tau_ap, scenario.f_samp, scenario.use_fractional_delay)
    r += gains.alpha_0 * np.outer(steering_vector(m, theta_ap), delayed)
    if scenario.ris_noise_variance > 0.0:
        if rng is None:
            raise InvalidParameterError("surface-stage noise requires an rng")
        r += _complex_noise(rng, r.shape, scenario.ris_noise_variance)
    return r


def apply_ris_reflection(r: np.ndarray, v: np.ndarray, phi_ris_pr_deg: float) -> np.ndarray:
    """Reflected waveform toward the receiver for one epoch's phase column.

    x[l] = a(phi)^T diag(v) r[:, l]; v must be unit modulus per element.
    """
    r = np.asarray(r)
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != r.shape[0]:
        raise InvalidParameterError("phase vector length must match the element count")
    if not np.allclose(np.abs(v), 1.0, atol=1e-6):
        raise InvalidParameterError("reflection coefficients must be unit modulus")
    radiate = steering_vector(r.shape[0], phi_ris_pr_deg)
    return (radiate * v) @ r


def pr_frame_angle(scenario: Scenario, point) -> float:
    """Effective bearing of a point in the receive array's boresight frame.

    A linear array's response depends only on the bearing's sine, so arrivals
    from behind the array fold onto the mirrored frontal angle.
    """
    lay = scenario.layout
    angle = wrap_angle_deg(bearing_deg(lay.p_pr, point) - lay.pr_boresight)
    folded = math.degrees(math.asin(math.sin(math.radians(angle))))
    return max(-89.999999, min(89.999999, folded))


def synthesize_pr_signal(
    scenario: Scenario,
    x: np.ndarray,
    zc,
    gains: PathGains,
    rng: np.random.Generator | None = None,
) -> SnapshotMatrix:
    """One epoch of received data at the PR array, shape (N_PR, L).

    Contains the surface-relayed waveform plus, where not blocked, the
    direct transmitter path and per-target bounce paths, plus AWGN.
    """
    lay = scenario.layout
    n = scenario.num_pr_antennas
    s = zc.samples
    f = scenario.f_samp
    frac = scenario.use_fractional_delay
    theta_ris = pr_frame_angle(scenario, lay.p_ris)
    y = gains.rho_ris_pr * np.outer(
        steering_vector(n, theta_ris),
        delay_signal(np.asarray(x), lay.d_ris_pr / SPEED_OF_LIGHT, f, frac),
    )
    if scenario.blockage_ap:
        tau = distance(lay.p_ap, lay.p_pr) / SPEED_OF_LIGHT
        y += (
            scenario.blockage_ap
            * gains.rho_ap_pr
            * np.outer(steering_vector(n, pr_frame_angle(scenario, lay.p_ap)), delay_signal(s, tau, f, frac))
        )
    for p, flag, rho in zip(scenario.targets, scenario.target_blockage, gains.rho_targets):
        if not flag:
            continue
        tau = (distance(lay.p_ap, p) + distance(p, lay.p_pr)) / SPEED_OF_LIGHT
        y += flag * rho * np.outer(
            steering_vector(n, pr_frame_angle(scenario, p)), delay_signal(s, tau, f, frac)
        )
    if scenario.noise_variance > 0.0:
        if rng is None:
            raise InvalidParameterError("receiver noise requires an rng")
        y += _complex_noise(rng, y.shape, scenario.noise_variance)
    return SnapshotMatrix(data=y, role="pr_raw")
