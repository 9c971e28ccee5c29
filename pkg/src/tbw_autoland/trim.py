"""Wings-level trim and longitudinal small-perturbation analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aircraft import IQ, ITHETA, IU, IW, N_STATES, AeroModel, TrimPoint
from .dynamics import derivative_kernel, wind_array
from .errors import TrimFailure

TRIM_TOLERANCE = 1e-9
MAX_ITERATIONS = 100
_LONGITUDINAL = (IU, IW, IQ, ITHETA)


def _trim_state(alpha: float, V: float, h: float, gamma: float = 0.0) -> np.ndarray:
    x = np.zeros(N_STATES)
    x[IU] = V * np.cos(alpha)
    x[IW] = V * np.sin(alpha)
    x[ITHETA] = alpha + gamma
    x[-1] = h
    return x


def _residual(z, P, V, h, gamma=0.0):
    alpha, de, thrust = z
    out = np.empty(N_STATES)
    derivative_kernel(_trim_state(alpha, V, h, gamma), de, thrust, P, wind_array(None), 0.0, out)
    return np.array([out[IU], out[IW], out[IQ]])


def solve_trim(model: AeroModel, V: float = 160.0, h: float = 100.0, gamma: float = 0.0) -> TrimPoint:
    """Angle of attack, elevator and thrust for steady wings-level flight at ``V``.

    ``gamma`` is the flight-path angle (rad, negative descending); the
    default is level flight. Newton iteration on the (u-dot, w-dot, q-dot)
    residuals with a central-difference Jacobian.
    """
    if not 100.0 <= V <= 250.0:
        raise ValueError(f"trim speed {V} m/s outside [100, 250]")
    P = model.to_array()
    z = np.array([-0.01, 0.0, 0.1 * model.weight])
    steps = np.array([1e-7, 1e-7, 1.0])
    r = _residual(z, P, V, h, gamma)
    for _ in range(MAX_ITERATIONS):
        if np.max(np.abs(r)) < TRIM_TOLERANCE:
            if z[2] < 0:
                raise TrimFailure(f"trim needs negative thrust ({z[2]:.1f} N)", residual=r)
            return TrimPoint(delta_E_trim=float(z[1]), thrust_trim=float(z[2]),
                             alpha_trim=float(z[0]), V=V, h=h, gamma=gamma)
        J = np.empty((3, 3))
        for k in range(3):
            dz = np.zeros(3)
            dz[k] = steps[k]
            J[:, k] = (_residual(z + dz, P, V, h, gamma) - _residual(z - dz, P, V, h, gamma)) / (2 * steps[k])
        z = z - np.linalg.solve(J, r)
        r = _residual(z, P, V, h, gamma)
    raise TrimFailure(f"trim did not converge in {MAX_ITERATIONS} iterations", residual=r)


@dataclass(frozen=True)
class LongitudinalModes:
    """Jacobian of (u, w, q, theta) about trim and its two mode pairs."""

    A: np.ndarray
    eigenvalues: np.ndarray
    short_period: np.ndarray
    phugoid: np.ndarray

    @property
    def oscillatory(self) -> bool:
        return bool(np.all(np.abs(self.eigenvalues.imag) > 0))


def longitudinal_jacobian(model: AeroModel, trim: TrimPoint, step: float = 1e-6) -> np.ndarray:
    P = model.to_array()
    x0 = _trim_state(trim.alpha_trim, trim.V, trim.h, trim.gamma)
    wind = wind_array(None)
    A = np.empty((4, 4))
    fp, fm = np.empty(N_STATES), np.empty(N_STATES)
    for col, idx in enumerate(_LONGITUDINAL):
        xp, xm = x0.copy(), x0.copy()
        xp[idx] += step
        xm[idx] -= step
        derivative_kernel(xp, trim.delta_E_trim, trim.thrust_trim, P, wind, 0.0, fp)
        derivative_kernel(xm, trim.delta_E_trim, trim.thrust_trim, P, wind, 0.0, fm)
        A[:, col] = (fp[list(_LONGITUDINAL)] - fm[list(_LONGITUDINAL)]) / (2 * step)
    return A


def linearize_longitudinal(model: AeroModel, trim: TrimPoint, step: float = 1e-6) -> LongitudinalModes:
    """Longitudinal modes about ``trim``.

    The two eigenvalues of largest magnitude are reported as the short-period
    pair, the two smallest as the phugoid. If a pair comes out real
    (overdamped) it is reported as-is.
    """
    A = longitudinal_jacobian(model, trim, step)
    eig = np.linalg.eigvals(A)
    by_size = eig[np.argsort(np.abs(eig))]
    phugoid = np.sort_complex(by_size[:2])
    short = np.sort_complex(by_size[2:])
    eig = eig[np.lexsort((eig.real, -np.abs(eig.imag)))]
    return LongitudinalModes(A=A, eigenvalues=eig, short_period=short, phugoid=phugoid)
