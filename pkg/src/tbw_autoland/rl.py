"""Tabular and fuzzy Q-learning over a (pitch error, pitch rate) grid.

The fuzzy machinery uses Gaussian memberships centred on the grid cells.
Within a window of neighbouring cells the memberships are normalised in log
space, so a query far from every centre still gets a well-defined weighted
mean (the nearest centre dominates) instead of 0/0.

Everything that runs inside the training loop is a ``numba`` kernel over
plain arrays. The Python functions below wrap them with grid objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import LearningDiverged

N_ACTIONS = 21
ACTIONS = np.round(np.linspace(-0.25, 0.25, N_ACTIONS), 12)
TIE_TOL = 1e-12
Q_FORMAT_VERSION = 1


def _mirror(negatives, with_zero: bool) -> np.ndarray:
    neg = np.round(np.asarray(negatives, dtype=float), 12)
    mid = [0.0] if with_zero else []
    return np.concatenate([neg, mid, -neg[::-1]])


def default_theta_centers() -> np.ndarray:
    """-10, -0.024:0.002:-0.002, -0.001, 0 and the mirrored positives (29 centres)."""
    neg = [-10.0] + [k * 1e-3 for k in range(-24, 0, 2)] + [-0.001]
    return _mirror(neg, with_zero=True)


def default_rate_centers(with_zero: bool = False) -> np.ndarray:
    """-10, -0.04, -0.02, -0.005 and mirrored positives; 0 is optional."""
    return _mirror([-10.0, -0.04, -0.02, -0.005], with_zero=with_zero)


@dataclass(frozen=True, eq=False)
class StateGrid:
    """Cell centres of the two MDP states and the membership widths.

    ``radius`` is the half-width of the fuzzy neighbourhood in cells: 2 gives
    the 5 x 5 window, 0 degenerates to the single nearest cell.
    """

    theta_centers: np.ndarray = field(default_factory=default_theta_centers)
    rate_centers: np.ndarray = field(default_factory=default_rate_centers)
    sigma_theta: float = 0.0005
    sigma_rate: float = 0.0025
    radius: int = 2

    def __post_init__(self):
        for c in (self.theta_centers, self.rate_centers):
            if np.any(np.diff(c) <= 0):
                raise ValueError("grid centres must be strictly increasing")
        if self.sigma_theta <= 0 or self.sigma_rate <= 0:
            raise ValueError("membership widths must be positive")
        if self.radius < 0:
            raise ValueError("window radius must be non-negative")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.theta_centers), len(self.rate_centers)

    def with_radius(self, radius: int) -> "StateGrid":
        return StateGrid(self.theta_centers, self.rate_centers, self.sigma_theta, self.sigma_rate, radius)

    def compatible(self, other: "StateGrid") -> bool:
        return (np.array_equal(self.theta_centers, other.theta_centers)
                and np.array_equal(self.rate_centers, other.rate_centers)
                and self.sigma_theta == other.sigma_theta and self.sigma_rate == other.sigma_rate)


# ---------------------------------------------------------------------------
# kernels

@njit(cache=True)
def nearest_index(centers, value):
    best = 0
    dbest = abs(value - centers[0])
    for i in range(1, centers.shape[0]):
        d = abs(value - centers[i])
        if d < dbest - TIE_TOL:
            best = i
            dbest = d
    return best


@njit(cache=True)
def greedy_index(Q, i, j):
    best = 0
    vbest = Q[i, j, 0]
    for k in range(1, Q.shape[2]):
        if Q[i, j, k] > vbest:
            vbest = Q[i, j, k]
            best = k
    return best


@njit(cache=True)
def window_weights(tc, rc, s_t, s_r, radius, theta, rate):
    """Window origin (i0, j0) and weights scaled so the largest is exactly 1."""
    ic = nearest_index(tc, theta)
    jc = nearest_index(rc, rate)
    i0 = max(ic - radius, 0)
    i1 = min(ic + radius, tc.shape[0] - 1)
    j0 = max(jc - radius, 0)
    j1 = min(jc + radius, rc.shape[0] - 1)
    ni = i1 - i0 + 1
    nj = j1 - j0 + 1
    logw = np.empty((ni, nj))
    lmax = -np.inf
    for a in range(ni):
        zt = (theta - tc[i0 + a]) / s_t
        for b in range(nj):
            zr = (rate - rc[j0 + b]) / s_r
            lw = -0.5 * zt * zt - 0.5 * zr * zr
            logw[a, b] = lw
            if lw > lmax:
                lmax = lw
    w = np.empty((ni, nj))
    for a in range(ni):
        for b in range(nj):
            w[a, b] = math.exp(logw[a, b] - lmax)
    return i0, j0, w


@njit(cache=True)
def faa_kernel(Q, actions, tc, rc, s_t, s_r, radius, theta, rate):
    i0, j0, w = window_weights(tc, rc, s_t, s_r, radius, theta, rate)
    # blend offsets from one member so a uniform window returns that action exactly
    ref = actions[greedy_index(Q, i0, j0)]
    num = 0.0
    den = 0.0
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            num += w[a, b] * (actions[greedy_index(Q, i0 + a, j0 + b)] - ref)
            den += w[a, b]
    return ref + num / den


@njit(cache=True)
def fuzzy_q_kernel(Q, tc, rc, s_t, s_r, radius, theta, rate, ks):
    """Weighted mean of ``Q[i, j, ks[a, b]]`` over the window (``ks`` is window-shaped)."""
    i0, j0, w = window_weights(tc, rc, s_t, s_r, radius, theta, rate)
    num = 0.0
    den = 0.0
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            num += w[a, b] * Q[i0 + a, j0 + b, ks[a, b]]
            den += w[a, b]
    return num / den


@njit(cache=True)
def window_greedy(Q, tc, rc, s_t, s_r, radius, theta, rate):
    """Greedy action index of every window cell, window-shaped."""
    i0, j0, w = window_weights(tc, rc, s_t, s_r, radius, theta, rate)
    ks = np.empty(w.shape, dtype=np.int64)
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            ks[a, b] = greedy_index(Q, i0 + a, j0 + b)
    return ks


@njit(cache=True)
def uniform_actions(tc, rc, radius, theta, rate, k):
    ic = nearest_index(tc, theta)
    jc = nearest_index(rc, rate)
    ni = min(ic + radius, tc.shape[0] - 1) - max(ic - radius, 0) + 1
    nj = min(jc + radius, rc.shape[0] - 1) - max(jc - radius, 0) + 1
    return np.full((ni, nj), k, dtype=np.int64)


@njit(cache=True)
def fuzzy_max_kernel(Q, tc, rc, s_t, s_r, radius, theta, rate):
    i0, j0, w = window_weights(tc, rc, s_t, s_r, radius, theta, rate)
    num = 0.0
    den = 0.0
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            num += w[a, b] * Q[i0 + a, j0 + b, greedy_index(Q, i0 + a, j0 + b)]
            den += w[a, b]
    return num / den


TD_SHARED, TD_WEIGHTED, TD_CELLWISE = 0, 1, 2
TD_MODES = {"shared": TD_SHARED, "weighted": TD_WEIGHTED, "cellwise": TD_CELLWISE}


@njit(cache=True)
def fql_update_kernel(Q, tc, rc, s_t, s_r, radius, theta, rate, ks, R,
                      theta_next, rate_next, alpha, gamma, mode):
    """Fuzzy TD step over the window around ``(theta, rate)``.

    Cell ``(i0 + a, j0 + b)`` is credited for action ``ks[a, b]``: the action it
    contributed to the executed command.

    ``mode`` picks how the blended TD error reaches the cells:

    * shared: every window cell moves by ``alpha * TD``
    * weighted: each cell moves by ``alpha * w_ij * TD`` (normalised weight)
    * cellwise: each cell moves toward the common target,
      ``alpha * w_ij * (R + gamma V' - Q_ij)``

    Returns the blended TD error.
    """
    q_now = fuzzy_q_kernel(Q, tc, rc, s_t, s_r, radius, theta, rate, ks)
    v_next = fuzzy_max_kernel(Q, tc, rc, s_t, s_r, radius, theta_next, rate_next)
    target = R + gamma * v_next
    td = target - q_now
    i0, j0, w = window_weights(tc, rc, s_t, s_r, radius, theta, rate)
    den = 0.0
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            den += w[a, b]
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            k = ks[a, b]
            if mode == TD_SHARED:
                Q[i0 + a, j0 + b, k] += alpha * td
            elif mode == TD_WEIGHTED:
                Q[i0 + a, j0 + b, k] += alpha * (w[a, b] / den * td)
            else:
                Q[i0 + a, j0 + b, k] += alpha * (w[a, b] / den * (target - Q[i0 + a, j0 + b, k]))
    return td


@njit(cache=True)
def ql_update_kernel(Q, i, j, k, R, i_next, j_next, alpha, gamma):
    m = Q[i_next, j_next, greedy_index(Q, i_next, j_next)]
    td = R + gamma * m - Q[i, j, k]
    Q[i, j, k] += alpha * td
    return td


# reward parameter layout
(R_JUMP, R_PENALTY, R_B1, R_B2, R_B3, R_B4, R_B5, R_TE1, R_TE2, R_TQ1, R_TQ2, R_TQ3,
 R_WE, R_WQ, R_DEG) = range(15)


@njit(cache=True)
def reward_kernel(e_theta, rate, de, de_prev, rp):
    if abs(de) - abs(de_prev) > rp[R_JUMP]:
        return rp[R_PENALTY]
    scale = 180.0 / math.pi if rp[R_DEG] != 0.0 else 1.0
    e = abs(e_theta) * scale
    q = abs(rate) * scale
    bonus = 0.0
    hit = False
    if e < rp[R_TE1]:
        bonus += rp[R_B1]
        hit = True
    if e < rp[R_TE2]:
        bonus += rp[R_B2]
        hit = True
    if q < rp[R_TQ1]:
        bonus += rp[R_B3]
        hit = True
    if q < rp[R_TQ2]:
        bonus += rp[R_B4]
        hit = True
    if q < rp[R_TQ3]:
        bonus += rp[R_B5]
        hit = True
    if hit:
        return bonus
    return -(rp[R_WE] * e) ** 2 - (rp[R_WQ] * q) ** 2


# ---------------------------------------------------------------------------
# Python surface

@dataclass(frozen=True)
class RewardParams:
    """Shaped reward. Thresholds are in degrees (deg/s) unless ``degrees`` is False."""

    jump_threshold: float = 0.1
    jump_penalty: float = -10000.0
    bonuses: tuple = (300.0, 300.0, 400.0, 600.0, 800.0)
    theta_thresholds: tuple = (0.05, 0.02)
    rate_thresholds: tuple = (0.04, 0.02, 0.005)
    weights: tuple = (100.0, 40.0)
    degrees: bool = True

    def __post_init__(self):
        for fam in (self.theta_thresholds, self.rate_thresholds):
            if min(fam) <= 0 or list(fam) != sorted(fam, reverse=True):
                raise ValueError("reward thresholds must be positive and decreasing")

    @property
    def max_reward(self) -> float:
        return float(sum(self.bonuses))

    def to_array(self) -> np.ndarray:
        return np.array([self.jump_threshold, self.jump_penalty, *self.bonuses,
                         *self.theta_thresholds, *self.rate_thresholds, *self.weights,
                         1.0 if self.degrees else 0.0])


def reward(e_theta: float, q: float, delta_E: float, delta_E_prev: float,
           params: RewardParams = RewardParams()) -> float:
    return float(reward_kernel(e_theta, q, delta_E, delta_E_prev, params.to_array()))


def membership(theta: float, q: float, cell, grid: StateGrid) -> float:
    i, j = cell
    zt = (theta - grid.theta_centers[i]) / grid.sigma_theta
    zr = (q - grid.rate_centers[j]) / grid.sigma_rate
    return math.exp(-0.5 * zt * zt) * math.exp(-0.5 * zr * zr)


def nearest_cell(theta: float, q: float, grid: StateGrid) -> tuple[int, int]:
    if not (math.isfinite(theta) and math.isfinite(q)):
        raise ValueError("state must be finite")
    return int(nearest_index(grid.theta_centers, theta)), int(nearest_index(grid.rate_centers, q))


def window_cells(theta: float, q: float, grid: StateGrid):
    """Cells of the fuzzy window and their normalised weights (summing to 1)."""
    i0, j0, w = window_weights(grid.theta_centers, grid.rate_centers, grid.sigma_theta,
                               grid.sigma_rate, grid.radius, theta, q)
    cells = [(i0 + a, j0 + b) for a in range(w.shape[0]) for b in range(w.shape[1])]
    return cells, (w / w.sum()).ravel()


def select_egreedy(Q: np.ndarray, cell, epsilon: float, rng: np.random.Generator) -> int:
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    if rng.random() < epsilon:
        return int(rng.integers(Q.shape[2]))
    return int(greedy_index(Q, cell[0], cell[1]))


def nearest_action(delta_E: float, actions=ACTIONS) -> int:
    return int(nearest_index(actions, delta_E))


def _grid_args(grid: StateGrid):
    return grid.theta_centers, grid.rate_centers, grid.sigma_theta, grid.sigma_rate, grid.radius


def faa_action(Q: np.ndarray, theta: float, q: float, grid: StateGrid, actions=ACTIONS) -> float:
    """Continuous elevator: membership-weighted mean of the window's greedy actions."""
    return float(faa_kernel(Q, actions, *_grid_args(grid), theta, q))


def _window_actions(k, theta, q, grid):
    if np.ndim(k) == 0:
        return uniform_actions(grid.theta_centers, grid.rate_centers, grid.radius, theta, q, int(k))
    return np.asarray(k, dtype=np.int64)


def fuzzy_q(Q: np.ndarray, theta: float, q: float, k, grid: StateGrid) -> float:
    """Blended value of action ``k`` (an index, or one index per window cell)."""
    return float(fuzzy_q_kernel(Q, *_grid_args(grid), theta, q, _window_actions(k, theta, q, grid)))


def fuzzy_max_future(Q: np.ndarray, theta: float, q: float, grid: StateGrid) -> float:
    return float(fuzzy_max_kernel(Q, *_grid_args(grid), theta, q))


def _check_td(td, Q, context=""):
    if not math.isfinite(td):
        raise LearningDiverged(f"non-finite TD error{context}")


def fql_update(Q: np.ndarray, transition, alpha: float, gamma: float, grid: StateGrid,
               mode: str = "weighted") -> float:
    """In-place fuzzy TD update. ``transition = (theta, q, k, R, theta_next, q_next)``."""
    theta, q, k, R, theta_n, q_n = transition
    ks = _window_actions(k, theta, q, grid)
    td = fql_update_kernel(Q, *_grid_args(grid), theta, q, ks, R, theta_n, q_n, alpha, gamma,
                           TD_MODES[mode])
    _check_td(td, Q)
    return float(td)


def ql_update(Q: np.ndarray, cell, k: int, R: float, next_cell, alpha: float, gamma: float) -> float:
    td = ql_update_kernel(Q, cell[0], cell[1], int(k), R, next_cell[0], next_cell[1], alpha, gamma)
    _check_td(td, Q)
    return float(td)


class QTable:
    """Action values over ``grid`` x ``actions`` with persistence."""

    def __init__(self, grid: StateGrid | None = None, actions=ACTIONS, values=None):
        self.grid = grid or StateGrid()
        self.actions = np.asarray(actions, dtype=float)
        shape = (*self.grid.shape, len(self.actions))
        self.values = np.zeros(shape) if values is None else np.array(values, dtype=float)
        if self.values.shape != shape:
            raise ValueError(f"table shape {self.values.shape} does not match grid {shape}")

    def copy(self) -> "QTable":
        return QTable(self.grid, self.actions, self.values.copy())

    def greedy_actions(self) -> np.ndarray:
        return self.actions[np.argmax(self.values, axis=2)]

    def act(self, theta_error: float, rate: float) -> float:
        return faa_action(self.values, theta_error, rate, self.grid, self.actions)

    def save(self, path):
        path = Path(path)
        with open(path, "wb") as fh:
            np.savez(fh, version=Q_FORMAT_VERSION, theta_centers=self.grid.theta_centers,
                     rate_centers=self.grid.rate_centers,
                     sigmas=np.array([self.grid.sigma_theta, self.grid.sigma_rate]),
                     radius=self.grid.radius, actions=self.actions, values=self.values)
        return path

    @classmethod
    def load(cls, path, expect_grid: StateGrid | None = None, expect_actions=None) -> "QTable":
        with np.load(Path(path)) as data:
            version = int(data["version"])
            if version != Q_FORMAT_VERSION:
                raise ValueError(f"unsupported Q-table format version {version}")
            grid = StateGrid(data["theta_centers"], data["rate_centers"], float(data["sigmas"][0]),
                             float(data["sigmas"][1]), int(data["radius"]))
            actions = data["actions"]
            values = data["values"]
        if expect_grid is not None and not grid.compatible(expect_grid):
            raise ValueError("stored Q-table grid does not match the requested grid")
        if expect_actions is not None and not np.array_equal(actions, expect_actions):
            raise ValueError("stored Q-table action set does not match")
        return cls(grid, actions, values)
