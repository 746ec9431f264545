"""Receive beamforming weights and RIS reflection matrices.

Phase 0 probes all directions with randomized unit-modulus columns that
statistically null the direct transmitter path; each later phase beamforms
the surface toward one estimated direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import steering_vector
from .errors import InvalidParameterError


@dataclass(frozen=True)
class ReflectionMatrix:
    """Unit-modulus RIS phase columns, one per epoch, for one phase index."""

    entries: np.ndarray  # (M, N_epoch)
    phase_index: int = 0

    def __post_init__(self) -> None:
        if self.entries.ndim != 2:
            raise InvalidParameterError("reflection matrix must be 2-D (elements x epochs)")
        if not np.allclose(np.abs(self.entries), 1.0, atol=1e-9):
            raise InvalidParameterError("reflection coefficients must be unit modulus")
        if self.phase_index < 0:
            raise InvalidParameterError("phase_index must be non-negative")

    @property
    def num_elements(self) -> int:
        return self.entries.shape[0]

    @property
    def num_epochs(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class BeamWeights:
    """Receive combining weights with unit response toward the steered bearing."""

    w: np.ndarray

    @property
    def noise_gain(self) -> float:
        """Variance multiplier the weights apply to white noise."""
        return float(np.vdot(self.w, self.w).real)


def cascade_response(phi_ris_pr_deg: float, theta_deg: float, num_elements: int) -> np.ndarray:
    """Per-element reflect-path response for an arrival bearing.

    Entry i is the combined inbound steering phase toward `theta_deg` and
    outbound steering phase toward the receiver; the surface gain of a phase
    column v for that arrival is v @ cascade_response(...).
    """
    return steering_vector(num_elements, phi_ris_pr_deg) * steering_vector(num_elements, theta_deg)


def pr_beamformer(theta_ris_pr_deg: float, num_antennas: int) -> BeamWeights:
    """Norm-constrained weights maximizing power from the surface direction.

    w = a / ||a||^2, so w^H a(theta) = 1 exactly.
    """
    a = steering_vector(num_antennas, theta_ris_pr_deg)
    return BeamWeights(w=a / float(np.vdot(a, a).real))


def initial_reflection_matrix(
    theta_ap_ris_deg: float,
    phi_ris_pr_deg: float,
    num_elements: int,
    num_epochs: int,
    rng: np.random.Generator,
) -> ReflectionMatrix:
    """Randomized probing matrix for the direction-finding phase.

    Columns are standard complex Gaussian draws projected orthogonal to the
    transmitter's cascade direction, then restored to unit modulus. The
    projection nulls the transmitter exactly; after modulus restoration the
    null survives statistically (checked by test, roughly -15 dB).
    """
    if num_epochs < 1:
        raise InvalidParameterError("num_epochs must be at least 1")
    projected = unconstrained_probing_matrix(
        theta_ap_ris_deg, phi_ris_pr_deg, num_elements, num_epochs, rng
    )
    return ReflectionMatrix(entries=np.exp(1j * np.angle(projected)), phase_index=0)


def unconstrained_probing_matrix(
    theta_ap_ris_deg: float,
    phi_ris_pr_deg: float,
    num_elements: int,
    num_epochs: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """The projected Gaussian columns before modulus restoration.

    Exposed for verification: each column's cascade gain toward the
    transmitter bearing is exactly zero.
    """
    if num_elements < 2:
        raise InvalidParameterError("the probing projection needs at least 2 elements")
    ap_dir = np.conj(cascade_response(phi_ris_pr_deg, theta_ap_ris_deg, num_elements))
    projector = np.eye(num_elements, dtype=np.complex128) - np.outer(ap_dir, ap_dir.conj()) / float(
        np.vdot(ap_dir, ap_dir).real
    )
    gamma = (rng.standard_normal((num_elements, num_epochs)) +
             1j * rng.standard_normal((num_elements, num_epochs))) * np.sqrt(0.5)
    return projector @ gamma


def directed_reflection_matrix(
    theta_hat_deg: float,
    phi_ris_pr_deg: float,
    num_elements: int,
    num_epochs: int,
    phase_index: int = 1,
) -> ReflectionMatrix:
    """Beam the surface toward one estimated direction for every epoch.

    All columns equal the conjugated cascade response, so an arrival from the
    steered bearing reaches the receiver with coherent amplitude gain M.
    """
    if num_epochs < 1:
        raise InvalidParameterError("num_epochs must be at least 1")
    column = np.conj(cascade_response(phi_ris_pr_deg, theta_hat_deg, num_elements))
    return ReflectionMatrix(
        entries=np.tile(column[:, None], (1, num_epochs)), phase_index=phase_index
    )
