"""Dryden low-altitude turbulence and its coupling into the airframe equations.

The three shaping filters are realised in state space, discretised exactly
under a zero-order hold, and driven by held white noise of variance
``pi/dt``. That intensity makes the continuous filters' stationary variance
exactly ``sigma**2`` (the input has unit one-sided spectral density in
rad/s).

The gusts are treated as a field frozen in the Earth frame that the aircraft
flies through at ``u1``. The spatial gradient along track then follows from
the time rate of the gust samples (``dW/dx = (dW/dt)/u1``), and the local
Eulerian time derivative is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.linalg import expm

FT = 0.3048


@dataclass(frozen=True)
class DrydenParams:
    """Scale lengths (m) and intensities (m/s) at altitude ``z`` (m)."""

    u20: float
    z: float
    u1: float
    L_u: float
    L_v: float
    L_w: float
    sigma_u: float
    sigma_v: float
    sigma_w: float

    def scaled(self, factor: float) -> "DrydenParams":
        """Same spectra with every intensity multiplied by ``factor``."""
        return DrydenParams(self.u20 * factor, self.z, self.u1, self.L_u, self.L_v, self.L_w,
                            self.sigma_u * factor, self.sigma_v * factor, self.sigma_w * factor)


def dryden_scales(z: float, u20: float, u1: float = 160.0) -> DrydenParams:
    """Low-altitude scale lengths and intensities; ``z`` and lengths are converted via feet."""
    if not z > 0:
        raise ValueError("altitude must be positive for the Dryden scales")
    z_ft = z / FT
    base = 0.177 + 0.000823 * z_ft
    L_uv = z_ft / base ** 1.2 * FT
    sigma_w = 0.1 * u20
    sigma_uv = sigma_w / base ** 0.4
    return DrydenParams(u20=u20, z=z, u1=u1, L_u=L_uv, L_v=L_uv, L_w=z,
                        sigma_u=sigma_uv, sigma_v=sigma_uv, sigma_w=sigma_w)


def shaping_filters(params: DrydenParams):
    """Continuous (A, B, C) realisations of the u, v and w shaping filters.

    The v filter uses the same ``sqrt(2 L / (pi u1))`` gain as the w filter;
    with the ``(1 + 2 L s / u1)**2`` denominator that is the gain giving
    variance ``sigma_v**2``.
    """
    V = params.u1
    filters = []
    tau = params.L_u / V
    K = params.sigma_u * math.sqrt(2 * params.L_u / (math.pi * V))
    filters.append((np.array([[-1.0 / tau]]), np.array([[1.0]]), np.array([[K / tau]])))
    for L, sigma in ((params.L_v, params.sigma_v), (params.L_w, params.sigma_w)):
        K = sigma * math.sqrt(2 * L / (math.pi * V))
        a = 2 * math.sqrt(3) * L / V
        b = 2 * L / V
        A = np.array([[0.0, 1.0], [-1.0 / b ** 2, -2.0 / b]])
        B = np.array([[0.0], [1.0]])
        C = np.array([[K / b ** 2, K * a / b ** 2]])
        filters.append((A, B, C))
    return filters


def filter_response(params: DrydenParams, omega) -> np.ndarray:
    """|G(j omega)|^2 of the u, v, w filters, shape (3, len(omega))."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    V = params.u1
    s = 1j * omega
    Gu = params.sigma_u * np.sqrt(2 * params.L_u / (np.pi * V)) / (1 + params.L_u / V * s)
    out = [np.abs(Gu) ** 2]
    for L, sigma in ((params.L_v, params.sigma_v), (params.L_w, params.sigma_w)):
        G = sigma * np.sqrt(2 * L / (np.pi * V)) * (1 + 2 * np.sqrt(3) * L / V * s) / (1 + 2 * L / V * s) ** 2
        out.append(np.abs(G) ** 2)
    return np.array(out)


def _zoh(A, B, dt):
    n, m = B.shape
    M = np.zeros((n + m, n + m))
    M[:n, :n] = A
    M[:n, n:] = B
    E = expm(M * dt)
    return E[:n, :n], E[:n, n:]


@dataclass(frozen=True)
class DiscreteDryden:
    """ZOH-discretised filters stacked into one 5-state system (u:1, v:2, w:2)."""

    Ad: np.ndarray
    Bd: np.ndarray
    C: np.ndarray
    noise_gain: float
    dt: float


@lru_cache(maxsize=64)
def _discretize_cached(params: DrydenParams, dt: float) -> DiscreteDryden:
    Ad = np.zeros((5, 5))
    Bd = np.zeros((5, 3))
    C = np.zeros((3, 5))
    sl = (slice(0, 1), slice(1, 3), slice(3, 5))
    for k, (A, B, Cc) in enumerate(shaping_filters(params)):
        a, b = _zoh(A, B, dt)
        Ad[sl[k], sl[k]] = a
        Bd[sl[k], k:k + 1] = b
        C[k:k + 1, sl[k]] = Cc
    return DiscreteDryden(Ad, Bd, C, math.sqrt(math.pi / dt), dt)


def discretize(params: DrydenParams, dt: float) -> DiscreteDryden:
    if not dt > 0:
        raise ValueError("dt must be positive")
    return _discretize_cached(params, float(dt))


@njit(cache=True)
def _advance(Ad, Bd, C, gain, xf, noise):
    n = xf.shape[0]
    xn = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += Ad[i, j] * xf[j]
        for j in range(3):
            acc += Bd[i, j] * gain * noise[j]
        xn[i] = acc
    W = np.zeros(3)
    for i in range(3):
        for j in range(n):
            W[i] += C[i, j] * xn[j]
    return xn, W


@njit(cache=True)
def _run(Ad, Bd, C, gain, xf, noise):
    steps = noise.shape[0]
    out = np.empty((steps, 3))
    for k in range(steps):
        xf, W = _advance(Ad, Bd, C, gain, xf, noise[k])
        out[k] = W
    return out, xf


@dataclass
class WindState:
    """Filter memory plus the derived gust quantities consumed by the dynamics.

    ``dW_dt`` is the rate of the gust seen along the flight path,
    ``grad_W`` the body-axis spatial gradient (``grad_W[i, j] = dW_i/dx_j``),
    ``W_dot`` the transported wind acceleration and ``omega_w`` the
    air-mass angular rate, all in body axes.
    """

    filter_state: np.ndarray = field(default_factory=lambda: np.zeros(5))
    W: np.ndarray = field(default_factory=lambda: np.zeros(3))
    W_prev: np.ndarray = field(default_factory=lambda: np.zeros(3))
    dW_dt: np.ndarray = field(default_factory=lambda: np.zeros(3))
    grad_W: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    grad_W_earth: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    W_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega_w: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def kernel_array(self) -> np.ndarray:
        return np.concatenate([self.W, self.W_dot, self.omega_w])

    def copy(self) -> "WindState":
        return WindState(*(np.array(getattr(self, f)) for f in self.__dataclass_fields__))


def dryden_step(wind: WindState, params: DrydenParams, noise, dt: float) -> WindState:
    """Advance the three shaping filters one step with unit-variance ``noise``."""
    d = discretize(params, dt)
    xf, W = _advance(d.Ad, d.Bd, d.C, d.noise_gain, np.asarray(wind.filter_state, dtype=float),
                     np.asarray(noise, dtype=float))
    new = wind.copy()
    new.filter_state = xf
    new.W_prev = np.array(wind.W)
    new.W = W
    return new


def generate_gusts(params: DrydenParams, n_steps: int, dt: float, rng: np.random.Generator,
                   wind: WindState | None = None) -> np.ndarray:
    """Gust time history of shape (n_steps, 3), same recursion as :func:`dryden_step`."""
    d = discretize(params, dt)
    xf = np.zeros(5) if wind is None else np.asarray(wind.filter_state, dtype=float)
    noise = rng.standard_normal((n_steps, 3))
    out, _ = _run(d.Ad, d.Bd, d.C, d.noise_gain, xf, noise)
    return out


def body_to_earth(phi: float, theta: float, psi: float) -> np.ndarray:
    """Direction cosines taking body components to NED Earth components."""
    sf, cf = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(psi), math.cos(psi)
    return np.array([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])


def wind_angular_rates(grad_W, dcm_be=None) -> np.ndarray:
    """Air-mass rotation rate: half the curl of an Earth-frame gradient tensor.

    The result is resolved in body axes with ``dcm_be`` (Earth to body);
    identity if omitted.
    """
    G = np.asarray(grad_W, dtype=float)
    omega_e = 0.5 * np.array([G[2, 1] - G[1, 2], G[0, 2] - G[2, 0], G[1, 0] - G[0, 1]])
    return omega_e if dcm_be is None else dcm_be @ omega_e


def wind_gradients(wind: WindState, u1: float, dt: float, dcm_eb=None, velocity=None) -> WindState:
    """Populate the gust rate, gradients, transported acceleration and omega_w.

    ``dcm_eb`` maps body to Earth (identity when omitted). ``velocity`` is the
    air-relative body velocity; with it, the transported wind acceleration
    is evaluated along the inertial velocity ``v + W``.
    """
    new = wind.copy()
    T_eb = np.eye(3) if dcm_eb is None else np.asarray(dcm_eb)
    T_be = T_eb.T
    new.dW_dt = (np.asarray(wind.W) - np.asarray(wind.W_prev)) / dt
    grad_e = np.zeros((3, 3))
    grad_e[:, 0] = (T_eb @ new.dW_dt) / u1
    new.grad_W_earth = grad_e
    new.grad_W = T_be @ grad_e @ T_eb
    new.omega_w = wind_angular_rates(grad_e, T_be)
    if velocity is None:
        new.W_dot = np.zeros(3)
    else:
        new.W_dot = new.grad_W @ (np.asarray(velocity, dtype=float) + np.asarray(wind.W))
    return new


def add_sensor_noise(theta_meas: float, q_meas: float, sigmas, rng: np.random.Generator):
    """Zero-mean Gaussian errors on the pitch and pitch-rate measurements."""
    s_theta, s_q = sigmas
    if s_theta < 0 or s_q < 0:
        raise ValueError("noise standard deviations must be non-negative")
    e_theta, e_q = rng.standard_normal(2)
    return theta_meas + s_theta * e_theta, q_meas + s_q * e_q


class Turbulence:
    """Stateful gust source owned by one simulation run."""

    def __init__(self, params: DrydenParams, dt: float, rng: np.random.Generator):
        self.params = params
        self.dt = dt
        self.rng = rng
        self.state = WindState()

    def warm_up(self, seconds: float):
        for _ in range(int(round(seconds / self.dt))):
            self.state = dryden_step(self.state, self.params, self.rng.standard_normal(3), self.dt)

    def step(self, x) -> WindState:
        """Draw the next gust sample and derive its coupling terms at state ``x``."""
        self.state = dryden_step(self.state, self.params, self.rng.standard_normal(3), self.dt)
        T_eb = body_to_earth(x[6], x[7], x[8])
        self.state = wind_gradients(self.state, self.params.u1, self.dt, T_eb, x[0:3])
        return self.state
