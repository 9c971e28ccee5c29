"""Three-loop dynamic inversion: altitude -> pitch -> pitch rate -> elevator.

Each loop imposes first-order error dynamics ``e' + k e = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aircraft import ELEVATOR_LIMIT, P_CBAR, P_CMDE, P_RHO, P_S, AeroModel
from .dynamics import aero_kernel, wind_array
from .errors import ControllerFault

PHI_LIMIT = math.radians(89.0)


@dataclass(frozen=True)
class DIGains:
    k_h: float = 1.3
    k_theta: float = 5.0
    k_q: float = 10.0

    def __post_init__(self):
        if min(self.k_h, self.k_theta, self.k_q) <= 0:
            raise ValueError("dynamic inversion gains must be strictly positive")


def di_outer(h, h_des, hdot_des, u, v, w, phi, k_h) -> float:
    """Pitch attitude that makes the climb rate follow ``hdot_des - k_h (h - h_des)``.

    Uses hdot = u sin(theta) - (v sin(phi) + w cos(phi)) cos(theta), so the
    body-axis vertical velocity term is added back as ``atan(b_h / a_h)``.
    """
    if u < 1.0:
        raise ControllerFault(f"forward speed {u:.3g} m/s too low for the altitude loop")
    b_h = v * math.sin(phi) + w * math.cos(phi)
    arg = (hdot_des - k_h * (h - h_des)) / math.hypot(u, b_h)
    arg = min(max(arg, -1.0), 1.0)
    return math.asin(arg) + math.atan(b_h / u)


def di_middle(theta, theta_des, thetadot_des, r, phi, k_theta) -> float:
    if abs(phi) >= PHI_LIMIT:
        raise ControllerFault("bank angle too close to 90 deg for the pitch loop")
    return (thetadot_des - k_theta * (theta - theta_des) + r * math.sin(phi)) / math.cos(phi)


def di_inner(q, q_des, qdot_des, p, r, M_A, M_deltaE, inertias, k_q) -> float:
    """Elevator deflection that inverts the pitch equation.

    ``M_A`` is the aerodynamic pitching moment without the elevator term and
    ``M_deltaE`` the elevator moment per radian. ``inertias`` is
    ``(Ix, Iy, Iz)``.
    """
    if abs(M_deltaE) < 1e-9:
        raise ControllerFault("elevator has no pitch authority")
    Ix, Iy, Iz = inertias
    de = (Iy * (qdot_des - k_q * (q - q_des)) + (Ix - Iz) * r * p - M_A) / M_deltaE
    return min(max(de, -ELEVATOR_LIMIT), ELEVATOR_LIMIT)


def pitch_moment_split(x, model_params: np.ndarray, wind=None, alpha_dot: float = 0.0):
    """Elevator-free pitching moment and elevator effectiveness at state ``x``."""
    M_A = aero_kernel(x, 0.0, model_params, wind_array(wind), alpha_dot)[4]
    V2 = x[0] ** 2 + x[1] ** 2 + x[2] ** 2
    qbar = 0.5 * model_params[P_RHO] * V2
    M_de = qbar * model_params[P_S] * model_params[P_CBAR] * model_params[P_CMDE]
    return M_A, M_de


class DynamicInversionController:
    """Stateful DI autopilot; the only memory is for differencing the references.

    The controller carries its own (nominal) aircraft model, which may
    differ from the plant being flown.
    """

    def __init__(self, model: AeroModel, gains: DIGains = DIGains(), dt: float = 0.01):
        self.model = model
        self.params = model.to_array()
        self.gains = gains
        self.dt = dt
        self.reset()

    def reset(self):
        self._theta_des_prev = None
        self._thetadot_des_prev = None

    def pitch_command(self, h, h_des, hdot_des, x) -> float:
        return di_outer(h, h_des, hdot_des, x[0], x[1], x[2], x[6], self.gains.k_h)

    def feedforward(self, theta_des) -> tuple[float, float]:
        """Rate and acceleration of the pitch command by backward differences.

        Only the command sequence is differenced, never a measured signal,
        so sensor noise is not amplified by ``1/dt``.
        """
        if self._theta_des_prev is None:
            thetadot = 0.0
        else:
            thetadot = (theta_des - self._theta_des_prev) / self.dt
        if self._thetadot_des_prev is None:
            thetaddot = 0.0
        else:
            thetaddot = (thetadot - self._thetadot_des_prev) / self.dt
        self._theta_des_prev = theta_des
        self._thetadot_des_prev = thetadot
        return thetadot, thetaddot

    def elevator(self, theta_meas, q_meas, theta_des, x) -> tuple[float, float]:
        """Elevator command and the pitch-rate demand behind it."""
        g = self.gains
        thetadot_des, qdot_des = self.feedforward(theta_des)
        q_des = di_middle(theta_meas, theta_des, thetadot_des, x[5], x[6], g.k_theta)
        M_A, M_de = pitch_moment_split(x, self.params)
        m = self.model
        de = di_inner(q_meas, q_des, qdot_des, x[3], x[5], M_A, M_de, (m.Ix, m.Iy, m.Iz), g.k_q)
        return de, q_des
