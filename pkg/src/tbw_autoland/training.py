"""Online training of the pitch-attitude learners.

Each episode starts wings-level at the trim speed with a random initial
pitch, asks the learner to hold ``theta_des`` for a fixed horizon, and
updates the table after every integration step. An episode is one
``numba`` call; the random numbers it needs are drawn beforehand from a
``numpy`` generator so a seed fixes the whole run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

from .aircraft import AeroModel
from .dynamics import N_WIND, OK, rk4_kernel, state_status
from .errors import LearningDiverged
from .rl import (
    ACTIONS, TD_MODES, QTable, RewardParams, StateGrid, fql_update_kernel, faa_kernel, greedy_index,
    nearest_index, ql_update_kernel, reward_kernel, uniform_actions, window_greedy,
)
from .trim import solve_trim

METHODS = ("fql", "ql")
Q_TRIPWIRE = 1e12


@dataclass(frozen=True)
class LearningSchedule:
    """Linear, floored decay of exploration and learning rate.

    ``decay_per`` is ``"episode"`` (default) or ``"step"``.
    """

    epsilon_start: float = 0.1
    epsilon_decay: float = 3e-6
    epsilon_floor: float = 0.04
    alpha_start: float = 0.02
    alpha_decay: float = 9e-7
    alpha_floor: float = 0.002
    gamma: float = 0.99
    episodes: int = 20000
    episode_seconds: float = 5.0
    dt: float = 0.01
    decay_per: str = "episode"

    def __post_init__(self):
        if not 0.04 <= self.epsilon_floor <= self.epsilon_start <= 1:
            raise ValueError("epsilon must decay from its start to a floor of at least 0.04")
        if not 0 < self.alpha_floor <= self.alpha_start <= 1:
            raise ValueError("learning rate bounds out of order")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.episodes < 0:
            raise ValueError("episode count must be non-negative")
        if self.decay_per not in ("episode", "step"):
            raise ValueError("decay_per must be 'episode' or 'step'")

    @property
    def steps_per_episode(self) -> int:
        return int(round(self.episode_seconds / self.dt))

    def epsilon(self, n: int) -> float:
        return max(self.epsilon_start - self.epsilon_decay * n, self.epsilon_floor)

    def alpha(self, n: int) -> float:
        return max(self.alpha_start - self.alpha_decay * n, self.alpha_floor)

    def to_dict(self) -> dict:
        return asdict(self)


@njit(cache=True)
def run_episode(Q, x0, thrust, de0, P, theta_des, n_steps, dt, fuzzy, actions,
                tc, rc, s_t, s_r, radius, rp, eps, alpha, gamma, decay_step,
                eps_decay, eps_floor, alpha_decay, alpha_floor, step0,
                explore_u, explore_k, tripwire, td_mode, credit_nearest):
    """One training episode. Returns (return, status, failing step).

    status: 0 ok, 1 simulation diverged, 2 Q tripwire.
    """
    wind = np.zeros(9)
    x = x0.copy()
    de_prev = de0
    alpha_prev = math.atan2(x[2], x[0])
    total = 0.0
    for n in range(n_steps):
        if decay_step:
            g = step0 + n
            eps_n = max(eps - eps_decay * g, eps_floor)
            alpha_n = max(alpha - alpha_decay * g, alpha_floor)
        else:
            eps_n = eps
            alpha_n = alpha
        e = x[7] - theta_des
        rate = x[4] * math.cos(x[6]) - x[5] * math.sin(x[6])
        if explore_u[n] < eps_n:
            k = explore_k[n]
            de = actions[k]
            if fuzzy:
                ks = uniform_actions(tc, rc, radius, e, rate, k)
        elif fuzzy:
            if credit_nearest:
                de = faa_kernel(Q, actions, tc, rc, s_t, s_r, radius, e, rate)
                ks = uniform_actions(tc, rc, radius, e, rate, nearest_index(actions, de))
            else:
                ks = window_greedy(Q, tc, rc, s_t, s_r, radius, e, rate)
                de = faa_kernel(Q, actions, tc, rc, s_t, s_r, radius, e, rate)
        else:
            k = greedy_index(Q, nearest_index(tc, e), nearest_index(rc, rate))
            de = actions[k]
        a_now = math.atan2(x[2], x[0])
        a_dot = 0.0 if n == 0 else (a_now - alpha_prev) / dt
        xn = rk4_kernel(x, de, thrust, P, wind, a_dot, dt)
        if state_status(xn) != OK:
            return total, 1, n
        e_n = xn[7] - theta_des
        rate_n = xn[4] * math.cos(xn[6]) - xn[5] * math.sin(xn[6])
        R = reward_kernel(e_n, rate_n, de, de_prev, rp)
        if fuzzy:
            td = fql_update_kernel(Q, tc, rc, s_t, s_r, radius, e, rate, ks, R, e_n, rate_n, alpha_n, gamma,
                              td_mode)
        else:
            td = ql_update_kernel(Q, nearest_index(tc, e), nearest_index(rc, rate), k, R,
                             nearest_index(tc, e_n), nearest_index(rc, rate_n), alpha_n, gamma)
        if not abs(td) <= tripwire:
            return total, 2, n
        total += R
        de_prev = de
        alpha_prev = a_now
        x = xn
    return total, 0, n_steps


@dataclass
class TrainingResult:
    table: QTable
    returns: np.ndarray
    method: str
    seed: int
    schedule: LearningSchedule

    def moving_average(self, window: int = 100) -> np.ndarray:
        r = self.returns
        if len(r) == 0:
            return r.copy()
        c = np.cumsum(np.insert(r, 0, 0.0))
        out = np.empty(len(r))
        for n in range(len(r)):
            lo = max(0, n + 1 - window)
            out[n] = (c[n + 1] - c[lo]) / (n + 1 - lo)
        return out


def train(method: str = "fql", schedule: LearningSchedule = LearningSchedule(), seed: int = 0,
          episodes: int | None = None, model: AeroModel | None = None,
          grid: StateGrid | None = None, reward_params: RewardParams = RewardParams(),
          theta_des_deg: float = 1.0, theta0_range_deg=(0.0, 2.0), V: float = 160.0,
          h: float = 100.0, table: QTable | None = None, td_mode: str = "weighted",
          credit: str = "cell", progress=None) -> TrainingResult:
    """Train a pitch-hold table with fuzzy (``"fql"``) or tabular (``"ql"``) Q-learning.

    ``table`` resumes from an existing table (copied, never mutated).
    ``progress`` is an optional callable receiving ``(episode, return)``.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    n_ep = schedule.episodes if episodes is None else int(episodes)
    if n_ep < 0:
        raise ValueError("episode count must be non-negative")
    model = model or AeroModel.nominal()
    grid = grid or StateGrid()
    qt = QTable(grid) if table is None else table.copy()
    if table is not None and not qt.grid.compatible(grid):
        raise ValueError("resumed table uses a different grid")

    trim = solve_trim(model, V=V, h=h)
    P = model.to_array()
    rp = reward_params.to_array()
    rng = np.random.default_rng(seed)
    n_steps = schedule.steps_per_episode
    theta_des = math.radians(theta_des_deg)
    returns = np.empty(n_ep)
    per_step = schedule.decay_per == "step"
    lo, hi = theta0_range_deg
    actions = qt.actions
    for ep in range(n_ep):
        theta0 = math.radians(rng.uniform(lo, hi))
        explore_u = rng.random(n_steps)
        explore_k = rng.integers(0, len(actions), n_steps)
        x0 = trim.state(theta=theta0).to_array()
        counter = ep * n_steps if per_step else ep
        total, status, step = run_episode(
            qt.values, x0, trim.thrust_trim, trim.delta_E_trim, P, theta_des, n_steps, schedule.dt,
            method == "fql", actions, grid.theta_centers, grid.rate_centers, grid.sigma_theta,
            grid.sigma_rate, grid.radius, rp,
            schedule.epsilon(0 if per_step else counter), schedule.alpha(0 if per_step else counter),
            schedule.gamma, per_step, schedule.epsilon_decay, schedule.epsilon_floor,
            schedule.alpha_decay, schedule.alpha_floor, counter, explore_u, explore_k, Q_TRIPWIRE,
            TD_MODES[td_mode], credit == "nearest")
        if status == 2:
            raise LearningDiverged(f"|Q| exceeded {Q_TRIPWIRE:g}", episode=ep, step=int(step))
        if status == 1:
            raise LearningDiverged("aircraft state diverged during training", episode=ep, step=int(step))
        returns[ep] = total
        if progress is not None:
            progress(ep, total)
    return TrainingResult(qt, returns, method, seed, schedule)
