"""Nonlinear six-degree-of-freedom fixed-wing rigid-body model.

State convention: NED inertial position, body-axis air-relative velocity,
ZYX (yaw-pitch-roll) Euler attitude, body angular rates. Wind enters the
navigation kinematics only, so (u, v, w) stay air-relative and a steady or
slowly varying wind field needs no extra acceleration terms.

Forces and moments use the standard linear coefficient buildup with rate
terms normalized by 2*Va. Rotational dynamics use the reduced inertia
terms (gamma_1..gamma_8) so the roll/yaw equations are explicit in the
angular accelerations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, TYPE_CHECKING

import numpy as np

from .angles import wrap_pi
from .errors import (
    AirDataError,
    ConfigError,
    IntegrationFaultError,
    SingularityError,
    TrimFailureError,
)

if TYPE_CHECKING:  # pragma: no cover - type-only import avoids a module cycle
    from .control import ControlCommand

# Rate terms divide by 2*Va; below this airspeed the aerodynamic
# contribution is zeroed instead of blowing up.
MIN_AERO_AIRSPEED = 0.1

# Abort this close (rad) to the theta = +/-90 deg Euler singularity.
PITCH_SINGULARITY_MARGIN = 0.01

# Angle of attack (rad) still treated as inside the linear-lift range when
# locating the slowest trimmable airspeed.
LINEAR_ALPHA_LIMIT = math.radians(12.0)


@dataclass
class AircraftState:
    """Rigid-body state: position (NED, m), body air-relative velocity
    (m/s), Euler attitude (rad), and body rates (rad/s)."""

    pn: float = 0.0
    pe: float = 0.0
    pd: float = 0.0
    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.pn, self.pe, self.pd, self.u, self.v, self.w,
             self.phi, self.theta, self.psi, self.p, self.q, self.r]
        )

    @classmethod
    def from_array(cls, y) -> "AircraftState":
        return cls(*(float(x) for x in y))

    def position(self) -> np.ndarray:
        return np.array([self.pn, self.pe, self.pd])


@dataclass
class AircraftParams:
    """Physical aircraft description.

    All aerodynamic derivatives are per radian. Actuator limits are in
    radians (surfaces) and rad/s (slew); throttle is dimensionless [0, 1].
    """

    mass: float
    ixx: float
    iyy: float
    izz: float
    ixz: float
    wing_area: float
    wing_span: float
    mean_chord: float
    rho: float = 1.2682
    gravity: float = 9.81

    # Side force
    c_y_0: float = 0.0
    c_y_beta: float = 0.0
    c_y_p: float = 0.0
    c_y_r: float = 0.0
    c_y_delta_a: float = 0.0
    c_y_delta_r: float = 0.0
    # Roll moment
    c_ell_0: float = 0.0
    c_ell_beta: float = 0.0
    c_ell_p: float = 0.0
    c_ell_r: float = 0.0
    c_ell_delta_a: float = 0.0
    c_ell_delta_r: float = 0.0
    # Yaw moment
    c_n_0: float = 0.0
    c_n_beta: float = 0.0
    c_n_p: float = 0.0
    c_n_r: float = 0.0
    c_n_delta_a: float = 0.0
    c_n_delta_r: float = 0.0
    # Lift / drag / pitch moment
    c_lift_0: float = 0.0
    c_lift_alpha: float = 0.0
    c_lift_q: float = 0.0
    c_lift_delta_e: float = 0.0
    c_drag_0: float = 0.0
    c_drag_alpha: float = 0.0
    c_m_0: float = 0.0
    c_m_alpha: float = 0.0
    c_m_q: float = 0.0
    c_m_delta_e: float = 0.0
    # Propulsion: thrust = delta_t * (max_thrust - thrust_airspeed_decay*Va^2)
    max_thrust: float = 0.0
    thrust_airspeed_decay: float = 0.0
    # Actuator limits
    delta_a_max: float = math.radians(25.0)
    delta_e_max: float = math.radians(25.0)
    delta_r_max: float = math.radians(25.0)
    rate_limit: float = math.radians(400.0)

    @property
    def weight(self) -> float:
        return self.mass * self.gravity

    def validate(self) -> None:
        if self.mass <= 0.0:
            raise ConfigError("mass must be positive")
        if self.rho <= 0.0 or self.gravity <= 0.0:
            raise ConfigError("air density and gravity must be positive")
        if min(self.wing_area, self.wing_span, self.mean_chord) <= 0.0:
            raise ConfigError("wing area, span, and chord must be positive")
        if min(self.ixx, self.iyy, self.izz) <= 0.0:
            raise ConfigError("principal inertias must be positive")
        if self.ixx * self.izz - self.ixz**2 <= 0.0:
            raise ConfigError(
                "degenerate inertia tensor: ixx*izz - ixz^2 must be positive"
            )
        if min(self.delta_a_max, self.delta_e_max, self.delta_r_max) <= 0.0:
            raise ConfigError("actuator deflection limits must be positive")
        if self.rate_limit <= 0.0:
            raise ConfigError("actuator rate limit must be positive")


@dataclass
class AirData:
    """Derived air/ground reference quantities for one state."""

    va: float
    vg: float
    alpha: float
    beta: float
    gamma_climb: float
    chi: float


@dataclass
class GammaSet:
    """Reduced inertia terms for the explicit roll/yaw rate equations."""

    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    gamma5: float
    gamma6: float
    gamma7: float
    gamma8: float


@dataclass
class CombinedYawCoeffs:
    """Yaw-channel coefficients after folding the roll equation's share
    of the inertia coupling into the yaw buildup.

    a_psi1/a_psi2 are the damping and rudder-effectiveness coefficients of
    the resulting second-order heading plant; d_psi collects the remaining
    terms (sideslip, roll rate, aileron) as a disturbance input.
    """

    cr_0: float
    cr_beta: float
    cr_p: float
    cr_r: float
    cr_delta_a: float
    cr_delta_r: float
    a_psi1: float
    a_psi2: float
    d_psi: float


@dataclass
class ForcesMoments:
    """Total body-frame forces (N) and moments (N*m)."""

    fx: float
    fy: float
    fz: float
    l: float
    m: float
    n: float


@dataclass
class Environment:
    """Steady wind in NED (m/s). Gusts are added per step by the caller."""

    wind_n: float = 0.0
    wind_e: float = 0.0
    wind_d: float = 0.0


class GustModel:
    """Seeded first-order colored-noise gust generator.

    Each NED component is an independent discrete Ornstein-Uhlenbeck
    process with correlation time tau and stationary standard deviation
    equal to intensity. intensity = 0 keeps the output exactly zero while
    still being deterministic for a given seed.
    """

    def __init__(self, intensity: float, tau: float, dt: float, seed: int = 0):
        if tau <= 0.0 or dt <= 0.0:
            raise ConfigError("gust tau and dt must be positive")
        if intensity < 0.0:
            raise ConfigError("gust intensity must be non-negative")
        self.intensity = intensity
        self._decay = math.exp(-dt / tau)
        self._scale = intensity * math.sqrt(max(0.0, 1.0 - self._decay**2))
        self._rng = np.random.default_rng(seed)
        self._state = np.zeros(3)

    def step(self) -> np.ndarray:
        if self.intensity == 0.0:
            return np.zeros(3)
        noise = self._rng.standard_normal(3)
        self._state = self._decay * self._state + self._scale * noise
        return self._state.copy()


def body_to_inertial(phi: float, theta: float, psi: float) -> np.ndarray:
    """Standard ZYX Euler rotation taking body-frame vectors to NED."""
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cth * cpsi, sphi * sth * cpsi - cphi * spsi,
             cphi * sth * cpsi + sphi * spsi],
            [cth * spsi, sphi * sth * spsi + cphi * cpsi,
             cphi * sth * spsi - sphi * cpsi],
            [-sth, sphi * cth, cphi * cth],
        ]
    )


def air_data(state: AircraftState, env: Environment) -> AirData:
    """Airspeed/ground-speed quantities for the current state and wind."""
    va = math.sqrt(state.u**2 + state.v**2 + state.w**2)
    if va < MIN_AERO_AIRSPEED:
        alpha = 0.0
        beta = 0.0
    else:
        alpha = math.atan2(state.w, state.u)
        beta = math.asin(max(-1.0, min(1.0, state.v / va)))

    rot = body_to_inertial(state.phi, state.theta, state.psi)
    ground = rot @ np.array([state.u, state.v, state.w])
    ground += np.array([env.wind_n, env.wind_e, env.wind_d])
    vn, ve, vd = float(ground[0]), float(ground[1]), float(ground[2])
    horizontal = math.hypot(vn, ve)
    vg = math.sqrt(horizontal**2 + vd**2)
    chi = math.atan2(ve, vn) if horizontal > 1e-9 else 0.0
    gamma_climb = math.atan2(-vd, horizontal) if vg > 1e-9 else 0.0
    return AirData(va=va, vg=vg, alpha=alpha, beta=beta,
                   gamma_climb=gamma_climb, chi=wrap_pi(chi))


def gamma_terms(params: AircraftParams) -> GammaSet:
    """Reduced inertia terms from the (ixx, iyy, izz, ixz) tensor."""
    params.validate()
    ixx, iyy, izz, ixz = params.ixx, params.iyy, params.izz, params.ixz
    det = ixx * izz - ixz**2
    return GammaSet(
        gamma1=ixz * (ixx - iyy + izz) / det,
        gamma2=(izz * (izz - iyy) + ixz**2) / det,
        gamma3=izz / det,
        gamma4=ixz / det,
        gamma5=(izz - ixx) / iyy,
        gamma6=ixz / iyy,
        gamma7=((ixx - iyy) * ixx + ixz**2) / det,
        gamma8=ixx / det,
    )


def combined_yaw_coeffs(
    params: AircraftParams,
    gammas: GammaSet,
    airdata: AirData,
    p: float = 0.0,
    delta_a: float = 0.0,
) -> CombinedYawCoeffs:
    """Fold roll/yaw moment coefficients into the heading-plant form.

    Each combined coefficient is gamma4*c_ell_x + gamma8*c_n_x. The
    resulting heading dynamics are psi_ddot = -a_psi1*psi_dot +
    a_psi2*delta_r + d_psi, where d_psi collects the sideslip, roll-rate,
    and aileron contributions evaluated at the supplied p and delta_a.
    """
    va = airdata.va
    if va <= 0.0:
        raise AirDataError("combined yaw coefficients need positive airspeed")
    g4, g8 = gammas.gamma4, gammas.gamma8
    cr_0 = g4 * params.c_ell_0 + g8 * params.c_n_0
    cr_beta = g4 * params.c_ell_beta + g8 * params.c_n_beta
    cr_p = g4 * params.c_ell_p + g8 * params.c_n_p
    cr_r = g4 * params.c_ell_r + g8 * params.c_n_r
    cr_delta_a = g4 * params.c_ell_delta_a + g8 * params.c_n_delta_a
    cr_delta_r = g4 * params.c_ell_delta_r + g8 * params.c_n_delta_r

    rho, sw, bw = params.rho, params.wing_area, params.wing_span
    # The yaw-rate term enters the buildup as cr_r * bw*r/(2*Va), so one
    # airspeed power cancels in the damping coefficient.
    a_psi1 = -0.25 * rho * va * sw * bw**2 * cr_r
    a_psi2 = 0.5 * rho * va**2 * sw * bw * cr_delta_r
    qbar_s_b = 0.5 * rho * va**2 * sw * bw
    d_psi = qbar_s_b * (
        cr_0
        + cr_beta * airdata.beta
        + cr_p * (bw * p / (2.0 * va))
        + cr_delta_a * delta_a
    )
    return CombinedYawCoeffs(
        cr_0=cr_0,
        cr_beta=cr_beta,
        cr_p=cr_p,
        cr_r=cr_r,
        cr_delta_a=cr_delta_a,
        cr_delta_r=cr_delta_r,
        a_psi1=a_psi1,
        a_psi2=a_psi2,
        d_psi=d_psi,
    )


def thrust_force(params: AircraftParams, va: float, delta_t: float) -> float:
    """Body-x thrust: proportional to throttle with quadratic airspeed decay."""
    return delta_t * (params.max_thrust - params.thrust_airspeed_decay * va**2)


def aero_forces_moments(
    state: AircraftState,
    cmd: "ControlCommand",
    env: Environment,
    params: AircraftParams,
) -> ForcesMoments:
    """Total body-frame forces and moments: gravity + thrust + aerodynamics.

    Below MIN_AERO_AIRSPEED the aerodynamic terms are zeroed (the rate
    terms divide by Va) and only gravity and thrust remain.
    """
    sphi, cphi = math.sin(state.phi), math.cos(state.phi)
    sth, cth = math.sin(state.theta), math.cos(state.theta)
    weight = params.weight

    fx = -weight * sth
    fy = weight * sphi * cth
    fz = weight * cphi * cth

    va = math.sqrt(state.u**2 + state.v**2 + state.w**2)
    fx += thrust_force(params, va, cmd.delta_t)

    if va < MIN_AERO_AIRSPEED:
        return ForcesMoments(fx=fx, fy=fy, fz=fz, l=0.0, m=0.0, n=0.0)

    alpha = math.atan2(state.w, state.u)
    beta = math.asin(max(-1.0, min(1.0, state.v / va)))
    qbar_s = 0.5 * params.rho * va**2 * params.wing_area
    bw, cbar = params.wing_span, params.mean_chord
    p_hat = bw * state.p / (2.0 * va)
    q_hat = cbar * state.q / (2.0 * va)
    r_hat = bw * state.r / (2.0 * va)

    c_lift = (
        params.c_lift_0
        + params.c_lift_alpha * alpha
        + params.c_lift_q * q_hat
        + params.c_lift_delta_e * cmd.delta_e
    )
    c_drag = params.c_drag_0 + params.c_drag_alpha * alpha
    lift = qbar_s * c_lift
    drag = qbar_s * c_drag

    ca, sa = math.cos(alpha), math.sin(alpha)
    fx += -drag * ca + lift * sa
    fz += -drag * sa - lift * ca

    fy += qbar_s * (
        params.c_y_0
        + params.c_y_beta * beta
        + params.c_y_p * p_hat
        + params.c_y_r * r_hat
        + params.c_y_delta_a * cmd.delta_a
        + params.c_y_delta_r * cmd.delta_r
    )

    l = qbar_s * bw * (
        params.c_ell_0
        + params.c_ell_beta * beta
        + params.c_ell_p * p_hat
        + params.c_ell_r * r_hat
        + params.c_ell_delta_a * cmd.delta_a
        + params.c_ell_delta_r * cmd.delta_r
    )
    m = qbar_s * cbar * (
        params.c_m_0
        + params.c_m_alpha * alpha
        + params.c_m_q * q_hat
        + params.c_m_delta_e * cmd.delta_e
    )
    n = qbar_s * bw * (
        params.c_n_0
        + params.c_n_beta * beta
        + params.c_n_p * p_hat
        + params.c_n_r * r_hat
        + params.c_n_delta_a * cmd.delta_a
        + params.c_n_delta_r * cmd.delta_r
    )
    return ForcesMoments(fx=fx, fy=fy, fz=fz, l=l, m=m, n=n)


def state_derivative(
    state: AircraftState,
    fm: ForcesMoments,
    params: AircraftParams,
    env: Environment,
    gammas: GammaSet | None = None,
) -> np.ndarray:
    """Twelve state derivatives for the rigid-body equations of motion."""
    if abs(state.theta) >= math.pi / 2.0 - PITCH_SINGULARITY_MARGIN:
        raise SingularityError(
            f"pitch {math.degrees(state.theta):.2f} deg too close to +/-90 deg",
            state=state,
        )
    if gammas is None:
        gammas = gamma_terms(params)

    u, v, w = state.u, state.v, state.w
    p, q, r = state.p, state.q, state.r
    sphi, cphi = math.sin(state.phi), math.cos(state.phi)
    sth, cth = math.sin(state.theta), math.cos(state.theta)
    tth = sth / cth
    spsi, cpsi = math.sin(state.psi), math.cos(state.psi)

    # Navigation: rotate the air-relative body velocity to NED, add wind.
    pn_dot = (cth * cpsi) * u + (sphi * sth * cpsi - cphi * spsi) * v \
        + (cphi * sth * cpsi + sphi * spsi) * w + env.wind_n
    pe_dot = (cth * spsi) * u + (sphi * sth * spsi + cphi * cpsi) * v \
        + (cphi * sth * spsi - sphi * cpsi) * w + env.wind_e
    pd_dot = -sth * u + sphi * cth * v + cphi * cth * w + env.wind_d

    inv_mass = 1.0 / params.mass
    u_dot = r * v - q * w + fm.fx * inv_mass
    v_dot = p * w - r * u + fm.fy * inv_mass
    w_dot = q * u - p * v + fm.fz * inv_mass

    phi_dot = p + tth * (q * sphi + r * cphi)
    theta_dot = q * cphi - r * sphi
    psi_dot = (q * sphi + r * cphi) / cth

    g = gammas
    p_dot = g.gamma1 * p * q - g.gamma2 * q * r + g.gamma3 * fm.l + g.gamma4 * fm.n
    q_dot = g.gamma5 * p * r - g.gamma6 * (p**2 - r**2) + fm.m / params.iyy
    r_dot = g.gamma7 * p * q - g.gamma1 * q * r + g.gamma4 * fm.l + g.gamma8 * fm.n

    return np.array(
        [pn_dot, pe_dot, pd_dot, u_dot, v_dot, w_dot,
         phi_dot, theta_dot, psi_dot, p_dot, q_dot, r_dot]
    )


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray,
             dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def clamp_command(cmd: "ControlCommand", params: AircraftParams) -> "ControlCommand":
    """Clamp surface deflections to their limits and throttle to [0, 1]."""
    return replace(
        cmd,
        delta_a=max(-params.delta_a_max, min(params.delta_a_max, cmd.delta_a)),
        delta_e=max(-params.delta_e_max, min(params.delta_e_max, cmd.delta_e)),
        delta_r=max(-params.delta_r_max, min(params.delta_r_max, cmd.delta_r)),
        delta_t=max(0.0, min(1.0, cmd.delta_t)),
    )


def integrate_step(
    state: AircraftState,
    cmd: "ControlCommand",
    env: Environment,
    params: AircraftParams,
    dt: float,
    gammas: GammaSet | None = None,
) -> AircraftState:
    """Advance the state one fixed RK4 step with the command held constant.

    phi and psi are wrapped onto (-pi, pi] after the step; a pitch inside
    the singularity margin or any non-finite component aborts.
    """
    if dt <= 0.0:
        raise ConfigError("integration step must be positive")
    if gammas is None:
        gammas = gamma_terms(params)
    cmd = clamp_command(cmd, params)

    def f(y: np.ndarray) -> np.ndarray:
        s = AircraftState.from_array(y)
        fm = aero_forces_moments(s, cmd, env, params)
        return state_derivative(s, fm, params, env, gammas)

    y1 = rk4_step(f, state.as_array(), dt)
    if not np.all(np.isfinite(y1)):
        raise IntegrationFaultError("non-finite state after integration step",
                                    state=state)
    out = AircraftState.from_array(y1)
    out.phi = wrap_pi(out.phi)
    out.psi = wrap_pi(out.psi)
    if abs(out.theta) >= math.pi / 2.0 - PITCH_SINGULARITY_MARGIN:
        raise SingularityError(
            f"pitch {math.degrees(out.theta):.2f} deg too close to +/-90 deg",
            state=out,
        )
    return out


def stall_floor(params: AircraftParams) -> float:
    """Slowest level-flight airspeed with alpha inside the linear range."""
    c_lift_max = params.c_lift_0 + params.c_lift_alpha * LINEAR_ALPHA_LIMIT
    if c_lift_max <= 0.0:
        raise ConfigError("lift model cannot carry weight at any alpha")
    return math.sqrt(
        2.0 * params.weight / (params.rho * params.wing_area * c_lift_max)
    )


def trim(
    params: AircraftParams,
    env: Environment,
    va_target: float,
    gamma_target: float = 0.0,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[AircraftState, "ControlCommand"]:
    """Solve wings-level straight-line trim at the target airspeed and
    climb angle.

    Damped Newton iteration on (alpha, delta_e, delta_t) driving the
    (u_dot, w_dot, q_dot) residual to zero; lateral variables are pinned
    at zero, which is exact for a laterally symmetric configuration. The
    returned pair re-evaluates to a full six-axis residual below tol.
    """
    from .control import ControlCommand

    params.validate()
    floor = stall_floor(params)
    if va_target <= floor:
        raise ConfigError(
            f"trim airspeed {va_target:.1f} m/s is at or below the "
            f"linear-range floor {floor:.1f} m/s"
        )
    gammas = gamma_terms(params)

    def build(x: np.ndarray) -> tuple[AircraftState, ControlCommand]:
        alpha, delta_e, delta_t = float(x[0]), float(x[1]), float(x[2])
        state = AircraftState(
            u=va_target * math.cos(alpha),
            w=va_target * math.sin(alpha),
            theta=alpha + gamma_target,
        )
        cmd = ControlCommand(delta_a=0.0, delta_e=delta_e, delta_r=0.0,
                             delta_t=delta_t)
        return state, cmd

    def residual(x: np.ndarray) -> np.ndarray:
        state, cmd = build(x)
        fm = aero_forces_moments(state, cmd, env, params)
        deriv = state_derivative(state, fm, params, env, gammas)
        return np.array([deriv[3], deriv[5], deriv[10]])  # u_dot, w_dot, q_dot

    x = np.array([0.05, 0.0, 0.5])
    res = residual(x)
    converged = False
    for _ in range(max_iter):
        if float(np.max(np.abs(res))) < 0.1 * tol:
            converged = True
            break
        jac = np.zeros((3, 3))
        h = 1e-7
        for j in range(3):
            dx = np.zeros(3)
            dx[j] = h
            jac[:, j] = (residual(x + dx) - residual(x - dx)) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise TrimFailureError(f"singular trim Jacobian: {exc}",
                                   residual=float(np.max(np.abs(res)))) from exc
        # Backtracking damping: halve the step until the residual shrinks.
        lam = 1.0
        while lam >= 1.0 / 64.0:
            x_new = x - lam * step
            res_new = residual(x_new)
            if float(np.max(np.abs(res_new))) < float(np.max(np.abs(res))):
                break
            lam /= 2.0
        else:
            raise TrimFailureError(
                "trim line search stalled",
                residual=float(np.max(np.abs(res))),
            )
        x, res = x_new, res_new
    if not converged and float(np.max(np.abs(res))) >= 0.1 * tol:
        raise TrimFailureError(
            f"trim did not converge in {max_iter} iterations",
            residual=float(np.max(np.abs(res))),
        )

    state, cmd = build(x)
    if not 0.0 <= cmd.delta_t <= 1.0:
        raise TrimFailureError(
            f"trim throttle {cmd.delta_t:.3f} outside [0, 1]",
            residual=float(np.max(np.abs(res))),
        )
    if abs(cmd.delta_e) > params.delta_e_max:
        raise TrimFailureError(
            f"trim elevator {math.degrees(cmd.delta_e):.1f} deg exceeds limit",
            residual=float(np.max(np.abs(res))),
        )

    # Full six-axis check plus achieved climb angle (theta - alpha here,
    # exact for beta = 0 and wings level).
    fm = aero_forces_moments(state, cmd, env, params)
    deriv = state_derivative(state, fm, params, env, gammas)
    full = np.abs(deriv[3:6]).tolist() + np.abs(deriv[9:12]).tolist()
    climb_err = abs((state.theta - math.atan2(state.w, state.u)) - gamma_target)
    if max(full) >= tol or climb_err >= tol:
        raise TrimFailureError(
            "trim residual check failed",
            residual=max(max(full), climb_err),
        )
    return state, cmd
