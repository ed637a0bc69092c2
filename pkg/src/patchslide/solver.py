"""Per-step friction impulse solve.

One backward-Euler step couples the friction impulse (p_t, p_o, p_r) and
the slip speed sigma through four quadratic equations: three stating that
the impulse opposes the end-of-step slip velocity with maximum power
dissipation, and one pinning the impulse to the friction ellipsoid
boundary.  This module evaluates that system, its analytic Jacobian, and
solves it by damped Newton iteration with deterministic multi-starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ContactImpulse, FrictionParams, SlipVelocity, StepInputs
from .errors import NoConvergenceError, ZeroSlipError

__all__ = [
    "SolverOptions",
    "SolveInfo",
    "residual",
    "jacobian",
    "max_dissipation_impulse",
    "stopping_impulse",
    "rest_reachable",
    "solve_step",
    "solve_step_info",
]


@dataclass(frozen=True)
class SolverOptions:
    """Newton solve knobs.

    tol is the residual infinity-norm target, scaled internally by
    max(1, (mu*p_n)^2).  sigma_min is the slip speed below which a
    converged solution is flagged as rest.  probe_second_root makes the
    solver keep trying the remaining starts after success and report
    whether a distinct nonnegative-sigma root exists.
    """

    tol: float = 1e-12
    max_iter: int = 100
    sigma_min: float = 1e-6
    probe_second_root: bool = False


@dataclass(frozen=True)
class SolveInfo:
    """Diagnostics for one solve: Newton iterations of the accepted
    attempt, final residual norm, rest flag, number of starts used, and
    whether a second distinct root with sigma >= 0 was detected."""

    iters: int
    residual_norm: float
    rest: bool
    starts: int
    second_root: bool = False


def _unpack(inp: StepInputs) -> tuple[float, ...]:
    p = inp.params
    f = inp.friction
    s = inp.state
    a = inp.applied
    return (
        p.m, p.I_z, p.q_z,
        f.mu, f.e_t, f.e_o, f.e_r,
        s.v_x, s.v_y, s.w_z,
        a.p_x, a.p_y, a.p_xtau, a.p_ytau, a.p_ztau,
        inp.p_n,
    )


def residual(z: tuple[float, float, float, float], inp: StepInputs) -> np.ndarray:
    """Four residuals of the per-step quadratic system at z = (p_t, p_o,
    p_r, sigma).  Zero exactly at a sliding solution."""
    (m, I_z, q_z, mu, e_t, e_o, e_r,
     v_x, v_y, w_z, p_x, p_y, p_xtau, p_ytau, p_ztau, p_n) = _unpack(inp)
    p_t, p_o, p_r, sigma = z
    W = w_z + (p_r + p_ztau) / I_z
    F1 = mu * p_n * e_t ** 2 * (v_x + (p_t + p_x) / m + (p_xtau + p_o * q_z) * W / p_n) + p_t * sigma
    F2 = mu * p_n * e_o ** 2 * (v_y + (p_o + p_y) / m + (p_ytau - p_t * q_z) * W / p_n) + p_o * sigma
    F3 = mu * p_n * e_r ** 2 * W + p_r * sigma
    F4 = (mu * p_n) ** 2 - (p_r / e_r) ** 2 - (p_t / e_t) ** 2 - (p_o / e_o) ** 2
    return np.array([F1, F2, F3, F4])


def jacobian(z: tuple[float, float, float, float], inp: StepInputs) -> np.ndarray:
    """Analytic Jacobian of residual() with respect to z.  The system is
    quadratic, so every entry is affine in z."""
    (m, I_z, q_z, mu, e_t, e_o, e_r,
     v_x, v_y, w_z, p_x, p_y, p_xtau, p_ytau, p_ztau, p_n) = _unpack(inp)
    p_t, p_o, p_r, sigma = z
    W = w_z + (p_r + p_ztau) / I_z
    alpha = mu * p_n * e_t ** 2
    beta = mu * p_n * e_o ** 2
    gamma = mu * p_n * e_r ** 2
    return np.array([
        [alpha / m + sigma,
         alpha * q_z * W / p_n,
         alpha * (p_xtau + p_o * q_z) / (I_z * p_n),
         p_t],
        [-beta * q_z * W / p_n,
         beta / m + sigma,
         beta * (p_ytau - p_t * q_z) / (I_z * p_n),
         p_o],
        [0.0, 0.0, gamma / I_z + sigma, p_r],
        [-2.0 * p_t / e_t ** 2, -2.0 * p_o / e_o ** 2, -2.0 * p_r / e_r ** 2, 0.0],
    ])


def max_dissipation_impulse(v: SlipVelocity, p_n: float, f: FrictionParams) -> ContactImpulse:
    """Friction impulse maximizing dissipated power against slip v.

    The maximizer on the ellipsoid boundary is p_i = -mu*p_n*e_i^2*v_i/sigma
    with sigma the generalized slip speed.  Raises ZeroSlipError when the
    slip velocity vanishes, since the direction is then undefined.
    """
    sigma = math.sqrt((f.e_t * v.v_t) ** 2 + (f.e_o * v.v_o) ** 2 + (f.e_r * v.v_r) ** 2)
    if sigma == 0.0:
        raise ZeroSlipError("slip velocity is zero; friction direction undefined")
    k = f.mu * p_n / sigma
    return ContactImpulse(
        p_t=-k * f.e_t ** 2 * v.v_t,
        p_o=-k * f.e_o ** 2 * v.v_o,
        p_r=-k * f.e_r ** 2 * v.v_r,
        sigma=sigma,
        p_n=p_n,
    )


def stopping_impulse(inp: StepInputs) -> tuple[float, float, float]:
    """Tangential impulse that would bring the slider exactly to rest this
    step, absorbing both the current momentum and the applied impulse."""
    m = inp.params.m
    I_z = inp.params.I_z
    s = inp.state
    a = inp.applied
    return (
        -(m * s.v_x + a.p_x),
        -(m * s.v_y + a.p_y),
        -(I_z * s.w_z + a.p_ztau),
    )


def rest_reachable(inp: StepInputs) -> bool:
    """Whether friction can stop the slider within this step.

    True exactly when the stopping impulse lies inside the friction
    ellipsoid; then the zero-slip branch of the contact model holds (all
    end-of-step slip velocities vanish identically) and no sliding
    solution with sigma > 0 is needed.
    """
    f = inp.friction
    p_t, p_o, p_r = stopping_impulse(inp)
    lhs = (p_t / f.e_t) ** 2 + (p_o / f.e_o) ** 2 + (p_r / f.e_r) ** 2
    return lhs <= (f.mu * inp.p_n) ** 2


def _initial_guess(inp: StepInputs) -> tuple[float, float, float, float]:
    # max-dissipation impulse at start-of-step velocities, ECP offsets
    # zeroed; fall back to applied-adjusted velocities when starting at rest
    f = inp.friction
    s = inp.state
    v = SlipVelocity(s.v_x, s.v_y, s.w_z)
    sigma0 = math.sqrt((f.e_t * v.v_t) ** 2 + (f.e_o * v.v_o) ** 2 + (f.e_r * v.v_r) ** 2)
    if sigma0 < 1e-12:
        m = inp.params.m
        I_z = inp.params.I_z
        a = inp.applied
        v = SlipVelocity(s.v_x + a.p_x / m, s.v_y + a.p_y / m, s.w_z + a.p_ztau / I_z)
    imp = max_dissipation_impulse(v, inp.p_n, f)
    return (imp.p_t, imp.p_o, imp.p_r, imp.sigma)


def _perturbations(z0: tuple[float, float, float, float]):
    # deterministic restarts: 10% scalings, per-component and full sign
    # flips, and slip-speed rescalings
    p_t, p_o, p_r, s = z0
    s = abs(s) if s != 0.0 else 1.0
    yield (1.1 * p_t, 1.1 * p_o, 1.1 * p_r, s)
    yield (0.9 * p_t, 0.9 * p_o, 0.9 * p_r, s)
    yield (-p_t, p_o, p_r, s)
    yield (p_t, -p_o, p_r, s)
    yield (p_t, p_o, -p_r, s)
    yield (-p_t, -p_o, -p_r, s)
    yield (p_t, p_o, p_r, 2.0 * s)
    yield (p_t, p_o, p_r, 0.5 * s)


def _newton(z0, inp: StepInputs, tol: float, max_iter: int):
    """Damped Newton with backtracking on ||F||^2.  Returns (z, iters,
    residual_norm, converged).  Convergence is checked before the first
    update, so an already-good guess is accepted with zero iterations."""
    z = np.asarray(z0, dtype=float)
    F = residual(tuple(z), inp)
    for it in range(max_iter):
        if float(np.max(np.abs(F))) <= tol:
            return z, it, float(np.max(np.abs(F))), True
        J = jacobian(tuple(z), inp)
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return z, it, float(np.max(np.abs(F))), False
        merit = float(F @ F)
        lam = 1.0
        z_try = z + d
        F_try = residual(tuple(z_try), inp)
        while float(F_try @ F_try) > (1.0 - 1e-4 * lam) * merit and lam > 1e-4:
            lam *= 0.5
            z_try = z + lam * d
            F_try = residual(tuple(z_try), inp)
        z, F = z_try, F_try
    ok = float(np.max(np.abs(F))) <= tol
    return z, max_iter, float(np.max(np.abs(F))), ok


def solve_step_info(
    inp: StepInputs,
    guess: ContactImpulse | None = None,
    options: SolverOptions | None = None,
) -> tuple[ContactImpulse, SolveInfo]:
    """Solve one implicit step; returns the impulse and solve diagnostics.

    If friction can absorb the entire momentum within the step, the step
    is a rest step: the returned impulse is the stopping impulse (strictly
    inside the ellipsoid), sigma is zero, and the rest flag is set.
    Otherwise Newton iteration runs from the warm-start guess (or the
    max-dissipation guess), restarting from deterministic perturbations
    when it stalls or lands on a negative-sigma root.
    """
    opt = options or SolverOptions()
    f = inp.friction
    scale = max(1.0, (f.mu * inp.p_n) ** 2)
    tol = opt.tol * scale

    if rest_reachable(inp):
        p_t, p_o, p_r = stopping_impulse(inp)
        imp = ContactImpulse(p_t=p_t, p_o=p_o, p_r=p_r, sigma=0.0, p_n=inp.p_n)
        return imp, SolveInfo(iters=0, residual_norm=0.0, rest=True, starts=0)

    if guess is not None:
        z0 = (guess.p_t, guess.p_o, guess.p_r, guess.sigma)
    else:
        z0 = _initial_guess(inp)

    starts = [z0, *_perturbations(z0)]
    accepted = None
    spurious = 0
    for k, start in enumerate(starts):
        z, iters, rnorm, ok = _newton(start, inp, tol, opt.max_iter)
        if not ok:
            continue
        if z[3] < 0.0:
            spurious += 1
            continue
        accepted = (z, iters, rnorm, k + 1)
        break
    if accepted is None:
        raise NoConvergenceError(
            f"no nonnegative-slip root from {len(starts)} starts "
            f"({spurious} negative-sigma roots rejected)"
        )

    z, iters, rnorm, used = accepted
    second = False
    if opt.probe_second_root:
        ref = np.abs(z).max()
        for start in starts[used:]:
            z2, _, _, ok2 = _newton(start, inp, tol, opt.max_iter)
            if ok2 and z2[3] >= 0.0 and np.max(np.abs(z2 - z)) > 1e-6 * max(1.0, ref):
                second = True
                break

    imp = ContactImpulse(p_t=float(z[0]), p_o=float(z[1]), p_r=float(z[2]),
                         sigma=float(z[3]), p_n=inp.p_n)
    rest = imp.sigma < opt.sigma_min
    return imp, SolveInfo(iters=iters, residual_norm=rnorm, rest=rest,
                          starts=used, second_root=second)


def solve_step(
    inp: StepInputs,
    guess: ContactImpulse | None = None,
    options: SolverOptions | None = None,
) -> ContactImpulse:
    """Solve one implicit step for the friction impulse and slip speed."""
    imp, _ = solve_step_info(inp, guess, options)
    return imp
