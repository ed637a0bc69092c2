"""Slow, independent reference solver for the per-step contact problem,
plus direct optimality checks on candidate solutions.

The reference path shares no solve code with the Newton solver: it
iterates a fixed point in end-of-step velocity space and, when that
stalls, falls back to an exhaustive grid search over the friction
impulse box followed by a bracketed search along the slip-speed-
parameterized solution curve.  The Newton solver's residual function is
reused only to *report* residual norms, which keeps the two solution
methods disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ContactImpulse, StepInputs
from .errors import OracleFailure
from .solver import residual

__all__ = ["KktReport", "oracle_solve_step", "verify_kkt"]

# iterate until the residual is this far below the failure floor
_TARGET_REL = 1e-12
_FLOOR_REL = 1e-7
_MAX_ITERS = 50_000
_STALL_ITERS = 300
_RELAX = 0.5
_GRID_RESOLUTION = 1e-8


def _rnorm(z: tuple[float, float, float, float], inp: StepInputs) -> float:
    return float(np.max(np.abs(residual(z, inp))))


def oracle_solve_step(inp: StepInputs) -> ContactImpulse:
    """Solve one implicit step by fixed-point iteration with grid fallback.

    From a velocity iterate, impulses follow from the maximum-dissipation
    closed form at the implied contact point offset; velocities are then
    recomputed from those impulses and relaxed.  On a stall the fallback
    runs the impulse-box grid search and then the slip-speed curve
    refinement, keeping the best candidate.  A rest-reachable step
    (stopping impulse inside the friction ellipsoid) returns the stopping
    impulse with zero slip speed, mirroring the fast solver's convention.
    Deterministic throughout.  Raises OracleFailure when no stage reaches
    the residual floor.
    """
    p = inp.params
    f = inp.friction
    s = inp.state
    a = inp.applied
    m, I_z, q_z = p.m, p.I_z, p.q_z
    mu, e_t, e_o, e_r = f.mu, f.e_t, f.e_o, f.e_r
    p_n = inp.p_n
    scale = max(1.0, (mu * p_n) ** 2)

    stop_t = -(m * s.v_x + a.p_x)
    stop_o = -(m * s.v_y + a.p_y)
    stop_r = -(I_z * s.w_z + a.p_ztau)
    if (stop_t / e_t) ** 2 + (stop_o / e_o) ** 2 + (stop_r / e_r) ** 2 <= (mu * p_n) ** 2:
        return ContactImpulse(p_t=stop_t, p_o=stop_o, p_r=stop_r, sigma=0.0, p_n=p_n)

    nu_x, nu_y, nu_w = s.v_x, s.v_y, s.w_z
    if nu_x == 0.0 and nu_y == 0.0 and nu_w == 0.0:
        nu_x = s.v_x + a.p_x / m
        nu_y = s.v_y + a.p_y / m
        nu_w = s.w_z + a.p_ztau / I_z
    p_t = p_o = p_r = 0.0
    best: tuple[float, float, float, float] | None = None
    best_rn = math.inf
    last_improve = 0
    for it in range(_MAX_ITERS):
        d_x = (a.p_ytau - p_t * q_z) / p_n
        d_y = (-a.p_xtau - p_o * q_z) / p_n
        v_t = nu_x - nu_w * d_y
        v_o = nu_y + nu_w * d_x
        v_r = nu_w
        sigma = math.sqrt((e_t * v_t) ** 2 + (e_o * v_o) ** 2 + (e_r * v_r) ** 2)
        if sigma == 0.0:
            break
        k = mu * p_n / sigma
        p_t = -k * e_t ** 2 * v_t
        p_o = -k * e_o ** 2 * v_o
        p_r = -k * e_r ** 2 * v_r
        z = (p_t, p_o, p_r, sigma)
        rn = _rnorm(z, inp)
        if rn < best_rn:
            best, best_rn = z, rn
            last_improve = it
        if rn <= _TARGET_REL * scale:
            break
        if it - last_improve > _STALL_ITERS:
            break
        new_x = s.v_x + (p_t + a.p_x) / m
        new_y = s.v_y + (p_o + a.p_y) / m
        new_w = s.w_z + (p_r + a.p_ztau) / I_z
        nu_x = (1.0 - _RELAX) * nu_x + _RELAX * new_x
        nu_y = (1.0 - _RELAX) * nu_y + _RELAX * new_y
        nu_w = (1.0 - _RELAX) * nu_w + _RELAX * new_w

    if best is None or best_rn > _TARGET_REL * scale:
        z, rn = _grid_search(inp)
        if best is None or rn < best_rn:
            best, best_rn = z, rn
    if best_rn > _TARGET_REL * scale:
        z, rn = _curve_refine(inp)
        if rn < best_rn:
            best, best_rn = z, rn
    if best_rn > _FLOOR_REL * scale:
        raise OracleFailure(
            f"residual floor not reached: {best_rn:.3e} > {_FLOOR_REL * scale:.3e}"
        )
    return ContactImpulse(p_t=best[0], p_o=best[1], p_r=best[2], sigma=best[3], p_n=p_n)


def _grid_search(inp: StepInputs) -> tuple[tuple[float, float, float, float], float]:
    """Exhaustive search over the impulse box, refined around the
    incumbent until every axis spacing is at or below the resolution
    target.  For each impulse candidate the slip speed is the
    nonnegative minimizer of the three tangential residuals (linear in
    sigma), which is exact at a root of the system."""
    p = inp.params
    f = inp.friction
    s = inp.state
    a = inp.applied
    m, I_z, q_z = p.m, p.I_z, p.q_z
    mu, e_t, e_o, e_r = f.mu, f.e_t, f.e_o, f.e_r
    p_n = inp.p_n

    bound = np.array([e_t, e_o, e_r]) * mu * p_n
    center = np.zeros(3)
    half = bound.copy()
    n = 64
    best_z = (0.0, 0.0, 0.0, 0.0)
    best_rn = math.inf
    while True:
        axes = [
            np.linspace(max(c - hw, -b), min(c + hw, b), n)
            for c, hw, b in zip(center, half, bound)
        ]
        P_t, P_o, P_r = (g.ravel() for g in np.meshgrid(*axes, indexing="ij"))
        W = s.w_z + (P_r + a.p_ztau) / I_z
        a1 = mu * p_n * e_t ** 2 * (s.v_x + (P_t + a.p_x) / m + (a.p_xtau + P_o * q_z) * W / p_n)
        a2 = mu * p_n * e_o ** 2 * (s.v_y + (P_o + a.p_y) / m + (a.p_ytau - P_t * q_z) * W / p_n)
        a3 = mu * p_n * e_r ** 2 * W
        denom = P_t ** 2 + P_o ** 2 + P_r ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            sigma = np.where(denom > 0.0, -(a1 * P_t + a2 * P_o + a3 * P_r) / denom, 0.0)
        sigma = np.maximum(sigma, 0.0)
        F4 = (mu * p_n) ** 2 - (P_r / e_r) ** 2 - (P_t / e_t) ** 2 - (P_o / e_o) ** 2
        rn = np.abs(a1 + P_t * sigma)
        np.maximum(rn, np.abs(a2 + P_o * sigma), out=rn)
        np.maximum(rn, np.abs(a3 + P_r * sigma), out=rn)
        np.maximum(rn, np.abs(F4), out=rn)
        k = int(np.argmin(rn))
        if float(rn[k]) < best_rn:
            best_rn = float(rn[k])
            best_z = (float(P_t[k]), float(P_o[k]), float(P_r[k]), float(sigma[k]))
        spacing = np.array([ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in axes])
        if np.all(spacing <= _GRID_RESOLUTION):
            return best_z, best_rn
        center = np.array(best_z[:3])
        half = spacing
        n = 16


def _curve_refine(inp: StepInputs) -> tuple[tuple[float, float, float, float], float]:
    """Precision stage of the fallback: search along the slip-speed-
    parameterized solution curve of the three tangential equations.

    For fixed sigma the rotational equation is linear in p_r and the two
    translational equations are a 2x2 linear system in (p_t, p_o) whose
    determinant is strictly positive, so the curve is exact and globally
    defined.  The remaining scalar equation (the ellipsoid constraint)
    is negative at sigma = 0 whenever the step cannot rest and tends to
    +(mu*p_n)^2 as sigma grows, so a sign change always exists; a dense
    scan plus bisection resolves it to roundoff.  Grid search over the
    impulse box cannot do this: the slip-speed fit flattens the residual
    along exactly this curve, stalling box refinement well above the
    floor."""
    p = inp.params
    f = inp.friction
    s = inp.state
    a = inp.applied
    m, I_z, q_z = p.m, p.I_z, p.q_z
    mu, e_t, e_o, e_r = f.mu, f.e_t, f.e_o, f.e_r
    p_n = inp.p_n
    alpha = mu * p_n * e_t ** 2
    beta = mu * p_n * e_o ** 2
    gamma = mu * p_n * e_r ** 2
    W0 = s.w_z + a.p_ztau / I_z

    def curve(sig):
        # exact solution of the three tangential equations at slip speed sig
        p_r = -gamma * W0 / (sig + gamma / I_z)
        W = W0 + p_r / I_z
        A11 = alpha / m + sig
        A12 = alpha * q_z * W / p_n
        A21 = -beta * q_z * W / p_n
        A22 = beta / m + sig
        det = A11 * A22 - A12 * A21
        b1 = -alpha * (s.v_x + a.p_x / m + a.p_xtau * W / p_n)
        b2 = -beta * (s.v_y + a.p_y / m + a.p_ytau * W / p_n)
        p_t = (b1 * A22 - A12 * b2) / det
        p_o = (A11 * b2 - A21 * b1) / det
        gap = (mu * p_n) ** 2 - (p_r / e_r) ** 2 - (p_t / e_t) ** 2 - (p_o / e_o) ** 2
        return gap, p_t, p_o, p_r

    hi = 4.0 * math.sqrt((e_t * s.v_x) ** 2 + (e_o * s.v_y) ** 2 + (e_r * s.w_z) ** 2) + 1.0
    while curve(hi)[0] < 0.0:
        hi *= 2.0

    grid = np.linspace(0.0, hi, 200_001)
    gaps = curve(grid)[0]
    roots: list[float] = [float(grid[k]) for k in np.flatnonzero(gaps == 0.0)]
    for k in np.flatnonzero(gaps[:-1] * gaps[1:] < 0.0):
        lo_s, hi_s = float(grid[k]), float(grid[k + 1])
        g_lo = float(gaps[k])
        for _ in range(100):
            mid = 0.5 * (lo_s + hi_s)
            g_mid = float(curve(mid)[0])
            if g_mid == 0.0:
                lo_s = hi_s = mid
                break
            if (g_mid < 0.0) == (g_lo < 0.0):
                lo_s, g_lo = mid, g_mid
            else:
                hi_s = mid
        roots.append(0.5 * (lo_s + hi_s))
    # the scan minimum covers tangent (non-crossing) roots
    roots.append(float(grid[int(np.argmin(np.abs(gaps)))]))

    best_z = (0.0, 0.0, 0.0, 0.0)
    best_rn = math.inf
    for sig in roots:
        _, p_t, p_o, p_r = curve(sig)
        z = (float(p_t), float(p_o), float(p_r), float(sig))
        rn = _rnorm(z, inp)
        if rn < best_rn:
            best_z, best_rn = z, rn
    return best_z, best_rn


@dataclass(frozen=True)
class KktReport:
    """Direct checks of a candidate solution: residual norm, distance to
    the friction-ellipsoid boundary, mismatch between sigma and the slip
    speed it should equal, and a sampled maximum-dissipation test."""

    residual_norm: float
    ellipsoid_gap: float
    sigma_identity_gap: float
    dissipation_optimality: bool


def verify_kkt(
    sol: ContactImpulse,
    inp: StepInputs,
    n_samples: int = 1000,
    seed: int = 0,
) -> KktReport:
    """Check a candidate sliding solution against the optimality system.

    The dissipation test samples n_samples points of the friction
    ellipsoid (half on the boundary, half inside, seeded) and verifies
    none dissipates more power against the end-of-step slip velocity
    than the candidate.  For a rest record (sigma = 0) the slip is zero,
    so the gaps reduce to the (expected) interior ellipsoid gap.
    """
    p = inp.params
    f = inp.friction
    s = inp.state
    a = inp.applied
    z = (sol.p_t, sol.p_o, sol.p_r, sol.sigma)
    rn = _rnorm(z, inp)
    ell = abs(
        (sol.p_t / f.e_t) ** 2 + (sol.p_o / f.e_o) ** 2 + (sol.p_r / f.e_r) ** 2
        - (f.mu * inp.p_n) ** 2
    )
    v_x1 = s.v_x + (sol.p_t + a.p_x) / p.m
    v_y1 = s.v_y + (sol.p_o + a.p_y) / p.m
    w_z1 = s.w_z + (sol.p_r + a.p_ztau) / p.I_z
    d_x = (a.p_ytau - sol.p_t * p.q_z) / inp.p_n
    d_y = (-a.p_xtau - sol.p_o * p.q_z) / inp.p_n
    v_t = v_x1 - w_z1 * d_y
    v_o = v_y1 + w_z1 * d_x
    v_r = w_z1
    sig_gap = abs(sol.sigma - math.sqrt((f.e_t * v_t) ** 2 + (f.e_o * v_o) ** 2 + (f.e_r * v_r) ** 2))

    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_samples, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.cbrt(rng.random(n_samples))
    radii[: n_samples // 2] = 1.0
    semi = np.array([f.e_t, f.e_o, f.e_r]) * f.mu * inp.p_n
    candidates = dirs * radii[:, None] * semi
    slip = np.array([v_t, v_o, v_r])
    d_sol = -(sol.p_t * v_t + sol.p_o * v_o + sol.p_r * v_r)
    d_best = float(np.max(-(candidates @ slip)))
    ok = d_sol >= d_best - 1e-12 * max(1.0, abs(d_sol))
    return KktReport(
        residual_norm=rn,
        ellipsoid_gap=ell,
        sigma_identity_gap=sig_gap,
        dissipation_optimality=bool(ok),
    )
