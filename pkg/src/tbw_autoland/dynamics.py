"""Nonlinear 6-DoF equations of motion, flat non-rotating Earth.

The heavy lifting happens in ``numba`` kernels that work on flat arrays
(state layout in :mod:`tbw_autoland.aircraft`, parameters from
``AeroModel.to_array``). The public functions wrap them for dataclass inputs.

Wind enters through a 9-vector::

    0..2  W^B      gust velocity, body axes (m/s)
    3..5  dW/dt^B  wind acceleration along the flight path (m/s^2)
    6..8  omega_w  air-mass angular rate, body axes (rad/s)

The velocity states are air-relative. With wind transport enabled the
translational equations carry the ``-(dW/dt + omega x W)`` term, and the
position kinematics use the inertial velocity ``v + W``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .aircraft import (
    ELEVATOR_LIMIT, G0, IH, ITHETA, N_STATES,
    P_CBAR, P_CD0, P_CDA, P_CDAD, P_CDDE, P_CDQ, P_CDU, P_CL0, P_CLA,
    P_CLAD, P_CLDE, P_CLQ, P_CLU, P_CM0, P_CMA, P_CMAD, P_CMDE, P_CMQ, P_CMU,
    P_FREF, P_IX, P_IXZ, P_IY, P_IZ, P_MASS, P_RHO, P_S, P_VP1, P_G,
    P_WIND_TRANSPORT,
    AeroModel, AircraftState, ControlInputs,
)
from .errors import SimulationDiverged

N_WIND = 9
EULER_LIMIT = math.radians(89.0)
MIN_AIRSPEED = 1.0

OK, NONFINITE, SINGULAR, STALLED = 0, 1, 2, 3

_ZERO_WIND = np.zeros(N_WIND)


@njit(cache=True)
def gravity_components(theta, phi, g):
    ct = math.cos(theta)
    return -g * math.sin(theta), g * ct * math.sin(phi), g * ct * math.cos(phi)


@njit(cache=True)
def aero_kernel(x, de, P, wind, alpha_dot):
    """Body-axis aerodynamic force and moment, returned as six floats."""
    ua, va, wa = x[0], x[1], x[2]
    V = math.sqrt(ua * ua + va * va + wa * wa)
    alpha = math.atan2(wa, ua)
    qbar = 0.5 * P[P_RHO] * V * V
    cbar = P[P_CBAR]
    vp1 = P[P_VP1]
    q_air = x[4] - wind[7]

    ad_hat = alpha_dot * cbar / (2.0 * vp1)
    u_hat = ua / vp1
    q_hat = q_air * cbar / (2.0 * vp1)

    CL = (P[P_CL0] + P[P_CLA] * alpha + P[P_CLAD] * ad_hat + P[P_CLU] * u_hat
          + P[P_CLQ] * q_hat + P[P_CLDE] * de)
    # drag build-up takes |alpha| and |delta_E|
    CD = (P[P_CD0] + P[P_CDA] * abs(alpha) + P[P_CDAD] * ad_hat + P[P_CDU] * u_hat
          + P[P_CDQ] * q_hat + P[P_CDDE] * abs(de))
    Cm = (P[P_CM0] + P[P_CMA] * alpha + P[P_CMAD] * ad_hat + P[P_CMU] * u_hat
          + P[P_CMQ] * q_hat + P[P_CMDE] * de)

    k_force = qbar * P[P_S] * P[P_FREF]
    lift = k_force * CL
    drag = k_force * CD
    pitch_moment = qbar * P[P_S] * cbar * Cm

    ca, sa = math.cos(alpha), math.sin(alpha)
    fx = -drag * ca + lift * sa
    fz = -drag * sa - lift * ca
    return fx, 0.0, fz, 0.0, pitch_moment, 0.0


@njit(cache=True)
def derivative_kernel(x, de, thrust, P, wind, alpha_dot, out):
    u, v, w = x[0], x[1], x[2]
    p, q, r = x[3], x[4], x[5]
    phi, theta, psi = x[6], x[7], x[8]
    m = P[P_MASS]

    fx, fy, fz, l_a, m_a, n_a = aero_kernel(x, de, P, wind, alpha_dot)
    gx, gy, gz = gravity_components(theta, phi, P[P_G])

    du = (fx + thrust) / m + gx - (q * w - r * v)
    dv = fy / m + gy - (r * u - p * w)
    dw = fz / m + gz - (p * v - q * u)
    if P[P_WIND_TRANSPORT] != 0.0:
        Wx, Wy, Wz = wind[0], wind[1], wind[2]
        du -= wind[3] + (q * Wz - r * Wy)
        dv -= wind[4] + (r * Wx - p * Wz)
        dw -= wind[5] + (p * Wy - q * Wx)

    # I * omega_dot = M - omega x (I omega), inertia [[Ix,0,Ixz],[0,Iy,0],[Ixz,0,Iz]]
    Ix, Iy, Iz, Ixz = P[P_IX], P[P_IY], P[P_IZ], P[P_IXZ]
    hx = Ix * p + Ixz * r
    hy = Iy * q
    hz = Ixz * p + Iz * r
    rx = l_a - (q * hz - r * hy)
    ry = m_a - (r * hx - p * hz)
    rz = n_a - (p * hy - q * hx)
    det = Ix * Iz - Ixz * Ixz
    dp = (Iz * rx - Ixz * rz) / det
    dq = ry / Iy
    dr = (Ix * rz - Ixz * rx) / det

    sphi, cphi = math.sin(phi), math.cos(phi)
    sth, cth = math.sin(theta), math.cos(theta)
    spsi, cpsi = math.sin(psi), math.cos(psi)
    tth = sth / cth
    dphi = p + (q * sphi + r * cphi) * tth
    dtheta = q * cphi - r * sphi
    dpsi = (q * sphi + r * cphi) / cth

    ui, vi, wi = u + wind[0], v + wind[1], w + wind[2]
    dx = (cpsi * cth * ui + (cpsi * sth * sphi - spsi * cphi) * vi
          + (cpsi * sth * cphi + spsi * sphi) * wi)
    dy = (spsi * cth * ui + (spsi * sth * sphi + cpsi * cphi) * vi
          + (spsi * sth * cphi - cpsi * sphi) * wi)
    dz = -sth * ui + cth * sphi * vi + cth * cphi * wi

    out[0], out[1], out[2] = du, dv, dw
    out[3], out[4], out[5] = dp, dq, dr
    out[6], out[7], out[8] = dphi, dtheta, dpsi
    out[9], out[10], out[11] = dx, dy, -dz


@njit(cache=True)
def rk4_kernel(x, de, thrust, P, wind, alpha_dot, dt):
    n = x.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    derivative_kernel(x, de, thrust, P, wind, alpha_dot, k1)
    for i in range(n):
        tmp[i] = x[i] + 0.5 * dt * k1[i]
    derivative_kernel(tmp, de, thrust, P, wind, alpha_dot, k2)
    for i in range(n):
        tmp[i] = x[i] + 0.5 * dt * k2[i]
    derivative_kernel(tmp, de, thrust, P, wind, alpha_dot, k3)
    for i in range(n):
        tmp[i] = x[i] + dt * k3[i]
    derivative_kernel(tmp, de, thrust, P, wind, alpha_dot, k4)
    out = np.empty(n)
    for i in range(n):
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return out


@njit(cache=True)
def state_status(x):
    for i in range(x.shape[0]):
        if not math.isfinite(x[i]):
            return NONFINITE
    if abs(x[ITHETA]) > EULER_LIMIT:
        return SINGULAR
    if math.sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) <= MIN_AIRSPEED:
        return STALLED
    return OK


_STATUS_TEXT = {
    NONFINITE: "non-finite state",
    SINGULAR: "pitch attitude within 1 deg of the Euler singularity",
    STALLED: "airspeed at or below 1 m/s",
}


def raise_for_status(status: int, x, t: float = 0.0):
    if status != OK:
        raise SimulationDiverged(_STATUS_TEXT[status], AircraftState.from_array(x, t))


def wind_array(wind) -> np.ndarray:
    if wind is None:
        return _ZERO_WIND
    if isinstance(wind, np.ndarray):
        return wind
    return wind.kernel_array()


def _params(model) -> np.ndarray:
    return model if isinstance(model, np.ndarray) else model.to_array()


def gravity_body(theta: float, phi: float, g: float = G0) -> np.ndarray:
    """Gravity acceleration resolved in body axes."""
    return np.array(gravity_components(theta, phi, g))


def aero_forces_moments(state: AircraftState, inputs: ControlInputs, model: AeroModel,
                        wind=None, alpha_dot: float = 0.0):
    """Aerodynamic force (N) and moment (N m) in body axes.

    The lateral channel carries no aerodynamic data, so the side force and the
    roll and yaw moments are zero.
    """
    x = state.to_array()
    V = math.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)
    if not V > MIN_AIRSPEED:
        raise ValueError(f"airspeed {V:.3g} m/s is below the {MIN_AIRSPEED} m/s minimum")
    out = aero_kernel(x, inputs.delta_E, _params(model), wind_array(wind), alpha_dot)
    f, m = np.array(out[:3]), np.array(out[3:])
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(m))):
        raise SimulationDiverged("non-finite aerodynamic load", state)
    return f, m


def state_derivative(state: AircraftState, inputs: ControlInputs, model: AeroModel,
                     wind=None, alpha_dot: float = 0.0) -> AircraftState:
    """Time derivative of every state; the returned ``t`` field is 1."""
    x = state.to_array()
    status = state_status(x)
    if status != OK:
        raise_for_status(status, x, state.t)
    out = np.empty(N_STATES)
    derivative_kernel(x, inputs.delta_E, inputs.thrust, _params(model), wind_array(wind),
                      alpha_dot, out)
    if not np.all(np.isfinite(out)):
        raise SimulationDiverged("non-finite state derivative", state)
    return AircraftState.from_array(out, t=1.0)


def integrate_step(state: AircraftState, inputs: ControlInputs, model: AeroModel,
                   wind=None, dt: float = 0.01, alpha_dot: float = 0.0) -> AircraftState:
    """Advance one fixed RK4 step, inputs and wind held over the step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = state.to_array()
    status = state_status(x)
    if status != OK:
        raise_for_status(status, x, state.t)
    de = min(max(inputs.delta_E, -ELEVATOR_LIMIT), ELEVATOR_LIMIT)
    xn = rk4_kernel(x, de, inputs.thrust, _params(model), wind_array(wind), alpha_dot, dt)
    status = state_status(xn)
    if status != OK:
        raise_for_status(status, xn, state.t + dt)
    return AircraftState.from_array(xn, t=state.t + dt)


def alpha_of(x) -> float:
    return math.atan2(x[2], x[0])
