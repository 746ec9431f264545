"""Bistatic sensing geometry: forward parameter computation and the inverse
ellipse-secant mapping from an (AoA, ToA) pair back to Cartesian coordinates.

Conventions
-----------
- 2-D Cartesian coordinates in meters, cell spanning [0, W] x [0, H].
- Bearings are measured counter-clockwise from the +x axis in degrees.
- The RIS angle of arrival is measured counter-clockwise from the RIS
  boresight bearing and is only defined on the open interval (-90, 90);
  targets must sit strictly in the boresight-facing half-plane.
- A total delay covers the full relay path transmitter -> target ->
  reflecting surface -> receiver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateGeometryError,
    InfeasibleDelayError,
    InvalidParameterError,
    NoSolutionError,
)

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class NodeLayout:
    """Fixed node positions and array orientations for one cell.

    `ris_boresight_deg` is the bearing of the RIS array normal;
    `pr_boresight_deg` is the bearing of the receive array normal and
    defaults to facing the RIS (so the RIS path arrives at 0 degrees).
    """

    p_ap: tuple[float, float]
    p_ris: tuple[float, float]
    p_pr: tuple[float, float]
    cell_width: float = 1000.0
    cell_height: float = 1000.0
    ris_boresight_deg: float = 0.0
    pr_boresight_deg: float | None = None

    def __post_init__(self) -> None:
        for name, p in (("p_ap", self.p_ap), ("p_ris", self.p_ris), ("p_pr", self.p_pr)):
            if not (math.isfinite(p[0]) and math.isfinite(p[1])):
                raise InvalidParameterError(f"{name} has non-finite coordinates: {p}")
            if not (0.0 <= p[0] <= self.cell_width and 0.0 <= p[1] <= self.cell_height):
                raise InvalidParameterError(f"{name}={p} lies outside the cell")
        if distance(self.p_ap, self.p_ris) == 0.0:
            raise InvalidParameterError("transmitter and RIS positions must be distinct")

    @property
    def pr_boresight(self) -> float:
        if self.pr_boresight_deg is not None:
            return self.pr_boresight_deg
        return bearing_deg(self.p_pr, self.p_ris)

    @property
    def d_ap_ris(self) -> float:
        return distance(self.p_ap, self.p_ris)

    @property
    def d_ris_pr(self) -> float:
        return distance(self.p_ris, self.p_pr)

    @property
    def relay_path_m(self) -> float:
        """Length of the target-free relay path through the RIS."""
        return self.d_ap_ris + self.d_ris_pr


@dataclass(frozen=True)
class SensingPair:
    """One target's sensing parameters: RIS angle of arrival and total delay."""

    aoa_deg: float
    tau_s: float

    def __post_init__(self) -> None:
        if not -90.0 < self.aoa_deg < 90.0:
            raise InvalidParameterError(f"aoa_deg must lie in (-90, 90), got {self.aoa_deg}")
        if not (math.isfinite(self.tau_s) and self.tau_s > 0.0):
            raise InvalidParameterError(f"tau_s must be positive and finite, got {self.tau_s}")


@dataclass(frozen=True)
class EllipseParams:
    """Axis-aligned description of the constant-path-sum ellipse.

    The foci are the transmitter and the RIS; `tilt_deg` is the bearing of
    the RIS as seen from the transmitter.
    """

    a: float
    b: float
    center: tuple[float, float]
    tilt_deg: float


def distance(p, q) -> float:
    """Euclidean distance between two 2-D points."""
    return math.hypot(p[0] - q[0], p[1] - q[1])


def bearing_deg(origin, point) -> float:
    """Bearing of `point` as seen from `origin`, CCW from +x, in (-180, 180]."""
    return math.degrees(math.atan2(point[1] - origin[1], point[0] - origin[0]))


def wrap_angle_deg(angle: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    wrapped = (angle + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped


def _segment_distance(p, a, b) -> float:
    """Distance from point p to the segment a-b."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return distance(p, a)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / seg2))
    return distance(p, (ax + t * dx, ay + t * dy))


def forward_sensing(p_target, layout: NodeLayout) -> SensingPair:
    """True sensing parameters of a target at a known position.

    The delay is the full relay path over the speed of light; the angle is
    the target bearing in the RIS boresight frame. Raises
    DegenerateGeometryError for targets on the transmitter-RIS segment or
    outside the open frontal sector of the RIS.
    """
    d_to_ris = distance(p_target, layout.p_ris)
    if d_to_ris == 0.0:
        raise DegenerateGeometryError("target coincides with the RIS")
    if distance(p_target, layout.p_ap) == 0.0:
        raise DegenerateGeometryError("target coincides with the transmitter")
    if _segment_distance(p_target, layout.p_ap, layout.p_ris) < 1e-9 * max(1.0, layout.d_ap_ris):
        raise DegenerateGeometryError("target lies on the transmitter-RIS segment")
    aoa = wrap_angle_deg(bearing_deg(layout.p_ris, p_target) - layout.ris_boresight_deg)
    if not -90.0 < aoa < 90.0:
        raise DegenerateGeometryError(
            f"target bearing {aoa:.3f} deg is outside the open (-90, 90) RIS sector"
        )
    total = distance(p_target, layout.p_ap) + d_to_ris + layout.d_ris_pr
    return SensingPair(aoa_deg=aoa, tau_s=total / SPEED_OF_LIGHT)


def ellipse_from_delay(tau_s: float, layout: NodeLayout) -> EllipseParams:
    """Ellipse of all positions consistent with a total delay.

    a = (c*tau - d_ris_pr) / 2, b = sqrt(a^2 - (d_ap_ris/2)^2), centered at
    the transmitter/RIS midpoint and tilted along their baseline.
    """
    path_sum = SPEED_OF_LIGHT * tau_s - layout.d_ris_pr
    d_foci = layout.d_ap_ris
    if path_sum <= d_foci:
        raise InfeasibleDelayError(
            f"delay {tau_s!r} implies focal sum {path_sum:.6f} m <= focal distance {d_foci:.6f} m"
        )
    a = 0.5 * path_sum
    b = math.sqrt(a * a - 0.25 * d_foci * d_foci)
    center = (
        0.5 * (layout.p_ap[0] + layout.p_ris[0]),
        0.5 * (layout.p_ap[1] + layout.p_ris[1]),
    )
    tilt = bearing_deg(layout.p_ap, layout.p_ris)
    return EllipseParams(a=a, b=b, center=center, tilt_deg=tilt)


def map_to_position(pair: SensingPair, layout: NodeLayout) -> tuple[float, float]:
    """Invert a sensing pair to the unique consistent target position.

    Intersects the ray leaving the RIS at the measured bearing with the
    constant-path-sum ellipse. The intersection is solved parametrically
    along the ray (no slope singularity for vertical bearings); of the two
    quadratic roots only the one in front of the RIS is physical, the other
    lies behind the array and is discarded.
    """
    ellipse = ellipse_from_delay(pair.tau_s, layout)
    # Ray direction in the ellipse-aligned frame.
    ray_bearing = math.radians(layout.ris_boresight_deg + pair.aoa_deg)
    tilt = math.radians(ellipse.tilt_deg)
    cos_t, sin_t = math.cos(tilt), math.sin(tilt)
    ux = math.cos(ray_bearing) * cos_t + math.sin(ray_bearing) * sin_t
    uy = -math.cos(ray_bearing) * sin_t + math.sin(ray_bearing) * cos_t
    # RIS position in the ellipse frame sits on the +x side of the center.
    rx_g = layout.p_ris[0] - ellipse.center[0]
    ry_g = layout.p_ris[1] - ellipse.center[1]
    x0 = rx_g * cos_t + ry_g * sin_t
    y0 = -rx_g * sin_t + ry_g * cos_t
    a2, b2 = ellipse.a**2, ellipse.b**2
    qa = ux * ux / a2 + uy * uy / b2
    qb = 2.0 * (x0 * ux / a2 + y0 * uy / b2)
    qc = x0 * x0 / a2 + y0 * y0 / b2 - 1.0
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        raise NoSolutionError("ray does not intersect the delay ellipse")
    sqrt_disc = math.sqrt(disc)
    roots = [(-qb - sqrt_disc) / (2.0 * qa), (-qb + sqrt_disc) / (2.0 * qa)]
    forward = [t for t in roots if t > 0.0]
    if not forward:
        raise NoSolutionError("no intersection on the boresight-facing side of the RIS")
    t_hit = min(forward)
    gx = math.cos(ray_bearing) * t_hit + layout.p_ris[0]
    gy = math.sin(ray_bearing) * t_hit + layout.p_ris[1]
    return (gx, gy)
