"""Shared types and wrench bookkeeping for planar sliding.

Conventions used throughout the package:

* SI units everywhere (m, kg, s, N).
* The support plane is the world x-y plane; z points up.
* The body frame has its origin at the projection of the center of mass
  onto the support plane and rotates with the slider by theta_z.
* Applied wrenches are expressed in the world frame and act about the
  center of mass.  Impulses are wrenches integrated over one step of
  length h.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import ContactLossError, ValidationError

__all__ = [
    "PolygonPatch",
    "AnnulusPatch",
    "DiskPatch",
    "ContactPatch",
    "SliderParams",
    "FrictionParams",
    "SliderState",
    "AppliedWrench",
    "AppliedImpulse",
    "ConstantSchedule",
    "BodyPusherSchedule",
    "TableSchedule",
    "WrenchSchedule",
    "StepInputs",
    "ContactImpulse",
    "SlipVelocity",
    "Ecp",
    "wrench_at",
    "to_impulse",
    "normal_impulse",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class PolygonPatch:
    """Contact patch bounded by a simple polygon, vertices in body frame."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        _require(len(self.vertices) >= 3, "polygon patch needs at least 3 vertices")
        _require(
            all(_finite(x, y) for x, y in self.vertices),
            "polygon patch vertices must be finite",
        )
        # shoelace sum; zero means the vertices are collinear
        area2 = 0.0
        n = len(self.vertices)
        for i in range(n):
            x0, y0 = self.vertices[i]
            x1, y1 = self.vertices[(i + 1) % n]
            area2 += x0 * y1 - x1 * y0
        _require(abs(area2) > 0.0, "polygon patch has zero area")


@dataclass(frozen=True)
class AnnulusPatch:
    """Ring-shaped contact patch centered on the body origin."""

    r_in: float
    r_out: float

    def __post_init__(self) -> None:
        _require(_finite(self.r_in, self.r_out), "annulus radii must be finite")
        _require(0.0 <= self.r_in < self.r_out, "annulus needs 0 <= r_in < r_out")


@dataclass(frozen=True)
class DiskPatch:
    """Full disk contact patch centered on the body origin."""

    r: float

    def __post_init__(self) -> None:
        _require(_finite(self.r) and self.r > 0.0, "disk radius must be positive")


ContactPatch = PolygonPatch | AnnulusPatch | DiskPatch


@dataclass(frozen=True)
class SliderParams:
    """Inertial and geometric description of the sliding body.

    m is the mass, I_z the moment of inertia about the vertical axis
    through the center of mass, q_z the height of the center of mass
    above the support plane, and g the gravitational acceleration.
    """

    m: float
    I_z: float
    q_z: float
    g: float
    patch: ContactPatch

    def __post_init__(self) -> None:
        _require(_finite(self.m, self.I_z, self.q_z, self.g), "slider parameters must be finite")
        _require(self.m > 0.0, "mass must be positive")
        _require(self.I_z > 0.0, "moment of inertia must be positive")
        _require(self.q_z >= 0.0, "center-of-mass height must be nonnegative")
        _require(self.g > 0.0, "gravity must be positive")


@dataclass(frozen=True)
class FrictionParams:
    """Friction coefficient and ellipsoid semi-axis constants.

    The admissible friction impulses over a step satisfy
    (p_t/e_t)^2 + (p_o/e_o)^2 + (p_r/e_r)^2 <= (mu * p_n)^2.
    e_t and e_o are dimensionless; e_r carries meters.
    """

    mu: float
    e_t: float
    e_o: float
    e_r: float

    def __post_init__(self) -> None:
        _require(_finite(self.mu, self.e_t, self.e_o, self.e_r), "friction parameters must be finite")
        _require(self.mu > 0.0, "friction coefficient must be positive")
        _require(self.e_t > 0.0 and self.e_o > 0.0 and self.e_r > 0.0, "ellipsoid constants must be positive")


@dataclass(frozen=True)
class SliderState:
    """Planar pose and velocity of the slider at time t."""

    q_x: float
    q_y: float
    theta_z: float
    v_x: float
    v_y: float
    w_z: float
    t: float


@dataclass(frozen=True)
class AppliedWrench:
    """External force and moment on the slider, world frame, about the CM."""

    lambda_x: float = 0.0
    lambda_y: float = 0.0
    lambda_z: float = 0.0
    lambda_xtau: float = 0.0
    lambda_ytau: float = 0.0
    lambda_ztau: float = 0.0

    @classmethod
    def zero(cls) -> "AppliedWrench":
        return cls()


@dataclass(frozen=True)
class AppliedImpulse:
    """External wrench integrated over one step."""

    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0
    p_xtau: float = 0.0
    p_ytau: float = 0.0
    p_ztau: float = 0.0


@dataclass(frozen=True)
class ConstantSchedule:
    """The same wrench at every time."""

    wrench: AppliedWrench


@dataclass(frozen=True)
class BodyPusherSchedule:
    """Force of magnitude force_mean + force_amp * cos(2*pi*t/period)
    applied at a body-fixed point along a body-fixed direction.

    point_body is (x, y, z) relative to the center of mass; the x-y part
    rotates with the slider while z is a fixed height offset.
    direction_body must be a unit vector in the body x-y plane; the
    applied force has no vertical component.
    """

    point_body: tuple[float, float, float]
    direction_body: tuple[float, float]
    force_mean: float
    force_amp: float
    period: float

    def __post_init__(self) -> None:
        _require(_finite(*self.point_body), "pusher point must be finite")
        _require(_finite(*self.direction_body), "pusher direction must be finite")
        _require(_finite(self.force_mean, self.force_amp), "pusher force terms must be finite")
        _require(self.period > 0.0, "pusher period must be positive")
        norm = math.hypot(*self.direction_body)
        _require(abs(norm - 1.0) <= 1e-9, "pusher direction must be a unit vector")


@dataclass(frozen=True)
class TableSchedule:
    """Zero-order hold over (time, wrench) samples.

    For t before the first sample the wrench is zero; otherwise the
    sample with the largest time <= t applies.
    """

    times: tuple[float, ...]
    wrenches: tuple[AppliedWrench, ...]

    def __post_init__(self) -> None:
        _require(len(self.times) == len(self.wrenches), "table needs one wrench per time")
        _require(len(self.times) >= 1, "table schedule needs at least one row")
        _require(
            all(self.times[i] < self.times[i + 1] for i in range(len(self.times) - 1)),
            "table times must be strictly increasing",
        )


WrenchSchedule = ConstantSchedule | BodyPusherSchedule | TableSchedule


def wrench_at(schedule: WrenchSchedule, state: SliderState, t: float) -> AppliedWrench:
    """Evaluate a wrench schedule at time t for the given slider state.

    Only the body pusher depends on the state (through theta_z).  Its
    moment is the cross product of the world-frame arm from the center
    of mass to the contact point with the world-frame force.
    """
    if isinstance(schedule, ConstantSchedule):
        return schedule.wrench
    if isinstance(schedule, TableSchedule):
        k = bisect_right(schedule.times, t) - 1
        if k < 0:
            return AppliedWrench.zero()
        return schedule.wrenches[k]
    c = math.cos(state.theta_z)
    s = math.sin(state.theta_z)
    dx, dy = schedule.direction_body
    mag = schedule.force_mean + schedule.force_amp * math.cos(2.0 * math.pi * t / schedule.period)
    fx = mag * (c * dx - s * dy)
    fy = mag * (s * dx + c * dy)
    px, py, pz = schedule.point_body
    rx = c * px - s * py
    ry = s * px + c * py
    rz = pz
    # tau = r x f with f_z = 0
    return AppliedWrench(
        lambda_x=fx,
        lambda_y=fy,
        lambda_z=0.0,
        lambda_xtau=-rz * fy,
        lambda_ytau=rz * fx,
        lambda_ztau=rx * fy - ry * fx,
    )


def to_impulse(wrench: AppliedWrench, h: float) -> AppliedImpulse:
    """Integrate a wrench held constant over a step of length h."""
    _require(h > 0.0, "step length must be positive")
    return AppliedImpulse(
        p_x=h * wrench.lambda_x,
        p_y=h * wrench.lambda_y,
        p_z=h * wrench.lambda_z,
        p_xtau=h * wrench.lambda_xtau,
        p_ytau=h * wrench.lambda_ytau,
        p_ztau=h * wrench.lambda_ztau,
    )


def normal_impulse(params: SliderParams, wrench: AppliedWrench, h: float) -> float:
    """Normal impulse p_n = h * (m*g - lambda_z) transmitted through the patch.

    Raises ContactLossError when the applied vertical force cancels the
    weight, since the sliding model requires sustained contact.
    """
    _require(h > 0.0, "step length must be positive")
    fn = params.m * params.g - wrench.lambda_z
    if fn <= 0.0:
        raise ContactLossError(
            f"vertical load {fn:g} N does not press the slider onto the plane"
        )
    return h * fn


@dataclass(frozen=True)
class StepInputs:
    """Everything one implicit step needs, with the wrench already
    integrated into impulses and the normal impulse resolved."""

    params: SliderParams
    friction: FrictionParams
    state: SliderState
    applied: AppliedImpulse
    p_n: float
    h: float

    def __post_init__(self) -> None:
        _require(self.p_n > 0.0, "normal impulse must be positive")
        _require(self.h > 0.0, "step length must be positive")


@dataclass(frozen=True)
class ContactImpulse:
    """Friction impulse over one step and the slip speed that produced it.

    For a sliding step the impulse lies on the friction ellipsoid and
    sigma > 0.  For a step flagged as rest the impulse is the stopping
    impulse (strictly inside the ellipsoid) and sigma == 0.
    """

    p_t: float
    p_o: float
    p_r: float
    sigma: float
    p_n: float


@dataclass(frozen=True)
class SlipVelocity:
    """Slip velocity at the equivalent contact point: tangential
    components v_t, v_o and the rotational rate v_r."""

    v_t: float
    v_o: float
    v_r: float


@dataclass(frozen=True)
class Ecp:
    """Equivalent contact point in world coordinates with containment flags.

    in_hull: inside the convex hull of the patch (support region).
    in_patch: inside the patch itself; differs from in_hull only for
    non-convex patches such as the annulus.
    """

    a_x: float
    a_y: float
    in_hull: bool
    in_patch: bool
