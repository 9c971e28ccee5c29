"""Landing simulations, metrics and the robustness sweep.

A landing run starts in trimmed flight at ``h0`` where the extended
glideslope passes through that altitude, either already descending along
it (default) or level, and flies the planner's path for
``duration`` seconds or until the wheels reach the ground. Thrust stays at
its initial trim value; only the elevator is controlled.

The pitch command comes from the altitude loop (the same law the dynamic
inversion controller uses as its outer loop) fed with the planned altitude
and climb rate, so all three controllers chase the same attitude
reference. By default that loop is evaluated with the initial trim
velocity components: fed the instantaneous ``w``, the command would move
with the angle of attack and the pitch loop would close a destabilising
path through it. ``pitch_reference="geometric"`` uses the path's own flight-path
angle instead.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .aircraft import IH, IQ, ITHETA, IX, AeroModel
from .atmosphere import Turbulence, body_to_earth, dryden_scales
from .dynamic_inversion import DIGains, DynamicInversionController, di_outer
from .dynamics import OK, rk4_kernel, state_status
from .errors import ControllerFault
from .faults import EQUATION_SCHEDULE, FaultSchedule, apply_fault
from .guidance import desired_state, plan_landing
from .rl import QTable, faa_action, greedy_index, nearest_index
from .trim import solve_trim

KINDS = ("ideal", "noise_disturbance", "actuator_fault", "model_uncertainty", "sweep")
CONTROLLERS = ("fql", "ql", "di")
SCENARIOS = KINDS[:4]

HISTORY_COLUMNS = ("t", "theta", "theta_des", "q", "h", "h_des", "delta_E_cmd", "delta_E_eff",
                   "u", "alpha", "Wz")

# divergence limits for a landing run
THETA_LIMIT = math.radians(45.0)
ALTITUDE_RUNAWAY = 200.0
# a run that ends past the threshold this close to the ground counts as landed
LANDED_HEIGHT = 1.0

SWEEP_SCALES = tuple(np.round(np.linspace(0.7, 1.3, 9), 6))
SWEEP_SPEEDS = tuple(np.round(np.linspace(150.0, 220.0, 9), 6))


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one landing run.

    ``model`` is ``"nominal"``, ``"uncertain"`` or ``"uncertain_literal"``;
    ``coefficient_scale`` multiplies every aerodynamic derivative of that
    model. Angles are in degrees, noise levels in deg and deg/s.
    """

    kind: str = "ideal"
    controller: str = "fql"
    seed: int = 0
    duration: float = 15.0
    dt: float = 0.01
    V0: float = 160.0
    h0: float = 100.0
    model: str | None = None
    coefficient_scale: float = 1.0
    pitch_reference: str = "altitude"
    initial_condition: str = "glideslope"
    outer_loop_velocity: str = "reference"
    rate_state: str = "error"
    di_gains: tuple = (1.3, 5.0, 10.0)
    fault_schedule: tuple = tuple(tuple(t) for t in EQUATION_SCHEDULE.to_triples())
    u20: float = 7.7
    gust_warmup: float = 5.0
    sensor_noise: tuple = (0.05, 0.01)
    theta_a: float = 3.0
    V_stall: float = 161.0 / 1.15
    screen_height: float = 50.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if self.pitch_reference not in ("altitude", "geometric"):
            raise ValueError("pitch_reference must be 'altitude' or 'geometric'")
        if self.initial_condition not in ("glideslope", "level"):
            raise ValueError("initial_condition must be 'glideslope' or 'level'")
        if self.outer_loop_velocity not in ("reference", "measured"):
            raise ValueError("outer_loop_velocity must be 'reference' or 'measured'")
        if self.rate_state not in ("error", "absolute"):
            raise ValueError("rate_state must be 'error' or 'absolute'")
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")
        if self.coefficient_scale <= 0:
            raise ValueError("coefficient scale must be positive")
        # tuples keep the config hashable after a JSON round trip
        object.__setattr__(self, "di_gains", tuple(float(g) for g in self.di_gains))
        object.__setattr__(self, "fault_schedule", tuple(tuple(float(v) for v in s) for s in self.fault_schedule))
        object.__setattr__(self, "sensor_noise", tuple(float(v) for v in self.sensor_noise))

    @property
    def model_variant(self) -> str:
        if self.model is not None:
            return self.model
        return "uncertain" if self.kind == "model_uncertainty" else "nominal"

    def plant(self) -> AeroModel:
        variant = self.model_variant
        if variant == "nominal":
            m = AeroModel.nominal()
        elif variant == "uncertain":
            m = AeroModel.uncertain(corrected=True)
        elif variant == "uncertain_literal":
            m = AeroModel.uncertain(corrected=False)
        else:
            raise ValueError(f"unknown model variant {variant!r}")
        return m if self.coefficient_scale == 1.0 else m.scaled(self.coefficient_scale)

    def faults(self) -> FaultSchedule | None:
        return FaultSchedule.from_triples(self.fault_schedule) if self.kind == "actuator_fault" else None

    @property
    def noisy(self) -> bool:
        return self.kind == "noise_disturbance"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["di_gains"] = list(self.di_gains)
        d["fault_schedule"] = [list(s) for s in self.fault_schedule]
        d["sensor_noise"] = list(self.sensor_noise)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown scenario keys: {sorted(extra)}")
        return cls(**data)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunMetrics:
    """Time-averaged tracking errors (deg, m), control effort (deg) and outcome."""

    TE_theta: float
    TE_h: float
    CE: float
    touchdown_speed: float
    landed: bool
    diverged: bool
    elapsed: float
    reason: str = ""
    config: ScenarioConfig | None = None
    history: dict = field(default_factory=dict, repr=False)

    def row(self) -> dict:
        c = self.config
        return {
            "kind": c.kind if c else "", "controller": c.controller if c else "",
            "seed": c.seed if c else "", "V0": c.V0 if c else "",
            "coefficient_scale": c.coefficient_scale if c else "",
            "TE_theta_deg": self.TE_theta, "TE_h_m": self.TE_h, "CE_deg": self.CE,
            "touchdown_speed": self.touchdown_speed, "landed": int(self.landed),
            "diverged": int(self.diverged), "elapsed_s": self.elapsed, "reason": self.reason,
            "config_hash": c.config_hash() if c else "",
        }


def time_average(t, y) -> float:
    """Trapezoid-rule integral of ``y`` over ``t`` divided by the elapsed time."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < 2 or t[-1] <= t[0]:
        return float(abs(y[0])) if len(y) else 0.0
    return float(np.trapezoid(y, t) / (t[-1] - t[0]))


def metrics_from_history(hist: dict) -> tuple[float, float, float]:
    t = hist["t"]
    te_theta = time_average(t, np.degrees(np.abs(hist["theta"] - hist["theta_des"])))
    te_h = time_average(t, np.abs(hist["h"] - hist["h_des"]))
    ce = time_average(t, np.degrees(np.abs(hist["delta_E_cmd"])))
    return te_theta, te_h, ce


class _RLPolicy:
    def __init__(self, table: QTable, fuzzy: bool):
        self.table = table
        self.fuzzy = fuzzy

    def __call__(self, e_theta, rate):
        t = self.table
        if self.fuzzy:
            return faa_action(t.values, e_theta, rate, t.grid, t.actions)
        i = nearest_index(t.grid.theta_centers, e_theta)
        j = nearest_index(t.grid.rate_centers, rate)
        return float(t.actions[greedy_index(t.values, i, j)])


def evaluate(config: ScenarioConfig, table: QTable | None = None, keep_history: bool = True) -> RunMetrics:
    """Fly one landing and score it.

    ``table`` is required for the learning controllers. The dynamic inversion
    controller uses ``config.di_gains`` and always carries the nominal model,
    whatever the plant is.
    """
    if config.controller in ("fql", "ql") and table is None:
        raise ValueError(f"controller {config.controller!r} needs a trained Q-table")
    plant = config.plant()
    P = plant.to_array()
    gamma0 = -math.radians(config.theta_a) if config.initial_condition == "glideslope" else 0.0
    trim = solve_trim(plant, V=config.V0, h=config.h0, gamma=gamma0)
    geom = plan_landing(V_stall=config.V_stall, theta_a=config.theta_a, h0=config.h0,
                        screen_height=config.screen_height)
    x = trim.state(x=geom.x_start).to_array()
    thrust = trim.thrust_trim
    uvw_ref = x[0:3].copy() if config.outer_loop_velocity == "reference" else None
    dt = config.dt
    n_steps = int(round(config.duration / dt))
    k_h = config.di_gains[0]
    faults = config.faults()

    di = None
    policy = None
    if config.controller == "di":
        di = DynamicInversionController(AeroModel.nominal(), DIGains(*config.di_gains), dt)
    else:
        policy = _RLPolicy(table, fuzzy=config.controller == "fql")

    turb = sensor_rng = None
    sig_theta, sig_q = (math.radians(s) for s in config.sensor_noise)
    if config.noisy:
        ss_turb, ss_sensor = np.random.SeedSequence(config.seed).spawn(2)
        params = dryden_scales(config.h0, config.u20, config.V0)
        turb = Turbulence(params, dt, np.random.default_rng(ss_turb))
        turb.warm_up(config.gust_warmup)
        sensor_rng = np.random.default_rng(ss_sensor)

    cols = {c: np.full(n_steps + 1, np.nan) for c in HISTORY_COLUMNS}
    wind = np.zeros(9)
    alpha_prev = math.atan2(x[2], x[0])
    theta_cmd_prev = None
    diverged = False
    reason = ""
    touchdown_speed = math.nan
    n_last = n_steps
    for n in range(n_steps + 1):
        t = n * dt
        des = desired_state(x[IX], geom)
        vel_e = body_to_earth(x[6], x[7], x[8]) @ (x[0:3] + wind[0:3])
        hdot_des = des.dh_dx * vel_e[0]
        try:
            if config.pitch_reference == "altitude":
                uvw = uvw_ref if uvw_ref is not None else x[0:3]
                theta_cmd = di_outer(x[IH], des.h, hdot_des, uvw[0], uvw[1], uvw[2], x[6], k_h)
            else:
                theta_cmd = des.theta
            theta_m, q_m = x[ITHETA], x[IQ]
            if sensor_rng is not None:
                theta_m += sig_theta * sensor_rng.standard_normal()
                q_m += sig_q * sensor_rng.standard_normal()
            rate_m = q_m * math.cos(x[6]) - x[5] * math.sin(x[6])
            if di is not None:
                de_cmd, _ = di.elevator(theta_m, q_m, theta_cmd, x)
            else:
                rate_cmd = 0.0 if theta_cmd_prev is None else (theta_cmd - theta_cmd_prev) / dt
                if config.rate_state == "absolute":
                    rate_cmd = 0.0
                de_cmd = policy(theta_m - theta_cmd, rate_m - rate_cmd)
            theta_cmd_prev = theta_cmd
        except ControllerFault as exc:
            diverged, reason, n_last = True, f"controller fault: {exc}", n
            break
        de_eff = apply_fault(de_cmd, t, faults) if faults is not None else de_cmd
        alpha_now = math.atan2(x[2], x[0])
        row = (t, x[ITHETA], theta_cmd, x[IQ], x[IH], des.h, de_cmd, de_eff, x[0], alpha_now, wind[2])
        for c, v in zip(HISTORY_COLUMNS, row):
            cols[c][n] = v
        n_last = n
        if x[IH] <= 0.0:
            touchdown_speed = math.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)
            reason = "touchdown"
            break
        if n == n_steps:
            break
        if turb is not None:
            wind = turb.step(x).kernel_array()
        alpha_dot = 0.0 if n == 0 else (alpha_now - alpha_prev) / dt
        alpha_prev = alpha_now
        x = rk4_kernel(x, de_eff, thrust, P, wind, alpha_dot, dt)
        if state_status(x) != OK or abs(x[ITHETA]) > THETA_LIMIT or x[IH] > config.h0 + ALTITUDE_RUNAWAY:
            diverged, reason = True, "state left the flight envelope"
            n_last = n
            break

    hist = {c: v[: n_last + 1] for c, v in cols.items()}
    te_theta, te_h, ce = metrics_from_history(hist)
    landed = not diverged and (reason == "touchdown" or (x[IX] >= geom.x_td and x[IH] <= LANDED_HEIGHT))
    if landed and reason != "touchdown":
        reason = "settled on the runway"
        touchdown_speed = math.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)
    if not reason:
        reason = "horizon reached"
    return RunMetrics(te_theta, te_h, ce, touchdown_speed, landed, diverged, float(hist["t"][-1]),
                      reason, config, hist if keep_history else {})


def _evaluate_job(args):
    config, table = args
    return evaluate(config, table, keep_history=False)


def sweep_configs(base: ScenarioConfig, scales=SWEEP_SCALES, speeds=SWEEP_SPEEDS) -> list[ScenarioConfig]:
    return [replace(base, kind="sweep", coefficient_scale=float(s), V0=float(v))
            for s in scales for v in speeds]


def robustness_sweep(controller: str = "fql", table: QTable | None = None, base: ScenarioConfig | None = None,
                     scales=SWEEP_SCALES, speeds=SWEEP_SPEEDS, workers: int = 1) -> list[RunMetrics]:
    """Coefficient-scale x initial-speed grid of landings, sorted by (scale, speed).

    A failed run is recorded as diverged and the sweep carries on.
    """
    base = base or ScenarioConfig(kind="sweep", controller=controller)
    base = replace(base, controller=controller)
    configs = sweep_configs(base, scales, speeds)
    jobs = [(c, table) for c in configs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_job, jobs))
    else:
        results = [_safe_job(j) for j in jobs]
    return sorted(results, key=lambda r: (r.config.coefficient_scale, r.config.V0))


def _safe_job(args):
    try:
        return _evaluate_job(args)
    except Exception as exc:  # one bad cell must not sink the sweep
        return RunMetrics(math.nan, math.nan, math.nan, math.nan, False, True, 0.0,
                          f"{type(exc).__name__}: {exc}", args[0])


def sweep_surface(results: list[RunMetrics], metric: str = "TE_theta"):
    """(scales, speeds, values) with values shaped (n_scales, n_speeds)."""
    scales = sorted({r.config.coefficient_scale for r in results})
    speeds = sorted({r.config.V0 for r in results})
    out = np.full((len(scales), len(speeds)), np.nan)
    for r in results:
        out[scales.index(r.config.coefficient_scale), speeds.index(r.config.V0)] = getattr(r, metric)
    return np.array(scales), np.array(speeds), out


COMPARE_METRICS = (("TE_theta", "TE_theta_deg"), ("TE_h", "TE_h_m"), ("CE", "CE_deg"))


def compare(results) -> dict:
    """Scenario x controller table of the three metrics with the best per cell flagged.

    ``results`` holds :class:`RunMetrics` or their ``row()`` dictionaries
    (as read back from ``metrics.csv``). Returns ``{"rows", "text"}``: one
    row per (scenario, metric) with a value per controller and the name of
    the smallest among runs that did not diverge.
    """
    table = {}
    for r in results:
        row = r.row() if isinstance(r, RunMetrics) else r
        table[(row["kind"], row["controller"])] = row
    scenarios = [k for k in KINDS if any(key[0] == k for key in table)]
    rows = []
    for sc in scenarios:
        for name, col in COMPARE_METRICS:
            out = {"scenario": sc, "metric": name}
            vals = {}
            for c in CONTROLLERS:
                r = table.get((sc, c))
                v = float(r[col]) if r is not None else math.nan
                out[c] = v
                if r is not None and not bool(int(r["diverged"])) and math.isfinite(v):
                    vals[c] = v
            out["best"] = min(vals, key=vals.get) if vals else ""
            rows.append(out)
    return {"rows": rows, "text": format_comparison(rows)}


def format_comparison(rows) -> str:
    head = f"{'scenario':<20}{'metric':<10}" + "".join(f"{c:>12}" for c in CONTROLLERS)
    lines = [head, "-" * len(head)]
    for row in rows:
        cells = []
        for c in CONTROLLERS:
            v = row[c]
            s = "n/a" if not math.isfinite(v) else f"{v:.3f}"
            cells.append(f"{s + ('*' if row['best'] == c else ' '):>12}")
        lines.append(f"{row['scenario']:<20}{row['metric']:<10}" + "".join(cells))
    return "\n".join(lines)


def manifest(config: ScenarioConfig | dict, seed: int, extra: dict | None = None) -> dict:
    cfg = config.to_dict() if isinstance(config, ScenarioConfig) else dict(config)
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    out = {"version": __version__, "seed": seed,
           "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16], "config": cfg}
    if extra:
        out.update(extra)
    return out
