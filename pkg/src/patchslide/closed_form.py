"""Closed-form velocity solutions for two special sliding regimes:
quasi-static pushing and pure translation under isotropic friction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import FrictionParams
from .errors import AnisotropicFrictionError, ValidationError, ZeroMotionError

__all__ = [
    "QuasiStaticInput",
    "TranslationStep",
    "quasi_static_velocity",
    "pure_translation_step",
]


@dataclass(frozen=True)
class QuasiStaticInput:
    """Pusher contact kinematics for the quasi-static model.

    contact_point is where the pusher touches the slider,
    contact_velocity the imposed velocity there, cm the center of mass,
    all in the world plane; c = e_r/e_t carries meters.
    """

    contact_point: tuple[float, float]
    contact_velocity: tuple[float, float]
    cm: tuple[float, float] = (0.0, 0.0)
    c: float = 1.0

    def __post_init__(self) -> None:
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValidationError("ellipsoid ratio c must be positive")


def quasi_static_velocity(inp: QuasiStaticInput) -> tuple[float, float, float]:
    """Slider velocity (v_x, v_y, w_z) under quasi-static pushing.

    Inertia-free force balance pins the slip center so that the slider
    velocity at the contact point equals the pusher velocity and the
    angular rate satisfies c^2 * w_z = dx*v_y - dy*v_x, with (dx, dy) the
    contact point relative to the CM.  Contact at the CM itself gives
    pure translation with the contact velocity, exactly.
    """
    dx = inp.contact_point[0] - inp.cm[0]
    dy = inp.contact_point[1] - inp.cm[1]
    v_cx, v_cy = inp.contact_velocity
    D = inp.c ** 2 + dx * dx + dy * dy
    w_z = (dx * v_cy - dy * v_cx) / D
    v_x = v_cx + w_z * dy
    v_y = v_cy - w_z * dx
    return (v_x, v_y, w_z)


@dataclass(frozen=True)
class TranslationStep:
    """One pure-translation step: friction impulse, slip speed, resulting
    velocity, and whether the step was clamped to rest."""

    p_t: float
    p_o: float
    sigma: float
    v_next: tuple[float, float]
    rest: bool


def pure_translation_step(
    v_u: tuple[float, float],
    applied: tuple[float, float],
    p_n: float,
    f: FrictionParams,
    m: float,
) -> TranslationStep:
    """One implicit step with w_z = 0, zero torques, and e_t = e_o.

    The friction impulse opposes the combined momentum
    g = m*v_u + applied with magnitude e_t*mu*p_n, and
    sigma = (e_t*|g| - e_t^2*mu*p_n)/m.  When |g| does not exceed the
    friction bound the step is clamped to exact rest and the impulse
    returned is the stopping impulse -g.
    """
    if f.e_t != f.e_o:
        raise AnisotropicFrictionError(
            f"pure translation requires e_t == e_o, got {f.e_t} and {f.e_o}"
        )
    gx = m * v_u[0] + applied[0]
    gy = m * v_u[1] + applied[1]
    S = math.hypot(gx, gy)
    if S == 0.0:
        raise ZeroMotionError("momentum plus applied impulse is zero; direction undefined")
    bound = f.e_t * f.mu * p_n
    if S <= bound:
        return TranslationStep(p_t=-gx, p_o=-gy, sigma=0.0, v_next=(0.0, 0.0), rest=True)
    k = bound / S
    p_t = -k * gx
    p_o = -k * gy
    sigma = (f.e_t * S - f.e_t ** 2 * f.mu * p_n) / m
    v_next = (v_u[0] + (p_t + applied[0]) / m, v_u[1] + (p_o + applied[1]) / m)
    return TranslationStep(p_t=p_t, p_o=p_o, sigma=sigma, v_next=v_next, rest=False)
