"""Aircraft data: stability derivatives, geometry, and the rigid-body state.

Everything is SI internally (m, s, kg, N, rad). The one imperial quantity
quoted for this airframe, the trim thrust in lbf, is converted at the I/O
boundary with :data:`LBF_TO_N`.

State vector layout used by the numerical kernels (``AircraftState.to_array``)::

    0:u 1:v 2:w 3:p 4:q 5:r 6:phi 7:theta 8:psi 9:x 10:y 11:h

``u, v, w`` are air-relative body-axis velocities (identical to the inertial
ones in still air), ``h`` is altitude, positive up.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

G0 = 9.80665
RHO_SEA_LEVEL = 1.225
LBF_TO_N = 4.448222
ELEVATOR_LIMIT = 0.25

N_STATES = 12
IU, IV, IW, IP, IQ, IR, IPHI, ITHETA, IPSI, IX, IY, IH = range(N_STATES)

# The aerodynamic derivatives, in the order of the parameter array
DERIVATIVE_NAMES = (
    "CD0", "CL0", "Cm0",
    "CDa", "CLa", "Cma",
    "CDu", "CLu", "Cmu",
    "CDq", "CLq", "Cmq",
    "CDde", "CLde", "Cmde",
    "CDad", "CLad", "Cmad",
)

# Indices into the flat parameter array consumed by the kernels
(P_CD0, P_CL0, P_CM0, P_CDA, P_CLA, P_CMA, P_CDU, P_CLU, P_CMU,
 P_CDQ, P_CLQ, P_CMQ, P_CDDE, P_CLDE, P_CMDE, P_CDAD, P_CLAD, P_CMAD,
 P_S, P_CBAR, P_B, P_MASS, P_IX, P_IY, P_IZ, P_IXZ, P_VP1, P_G, P_RHO,
 P_FREF, P_WIND_TRANSPORT) = range(31)
N_PARAMS = 31

# nominal stability and control derivatives (1/rad)
_IDEAL = dict(
    CD0=0.0338, CL0=0.3180, Cm0=-0.06,
    CDa=0.8930, CLa=14.88, Cma=-11.84,
    CDu=0.041, CLu=0.081, Cmu=-0.039,
    CDq=0.0, CLq=12.53, Cmq=-40.69,
    CDde=0.1570, CLde=0.78, Cmde=-5.98,
)

# perturbed derivative set, exactly as tabulated
_UNCERTAIN_LITERAL = dict(
    CD0=0.0358, CL0=0.3363, Cm0=-0.061,
    CDa=0.893, CLa=14.52, Cma=-11.84,
    CDu=0.373, CLu=0.076, Cmu=-0.041,
    CDq=0.0, CLq=12.56, Cmq=-37.27,
    CDde=float("01483"), CLde=0.74, Cmde=-5.93,
)

# Same column with the two evident typos repaired (missing decimal points)
_UNCERTAIN_CORRECTED = dict(_UNCERTAIN_LITERAL, CDu=0.0373, CDde=0.1483)


@dataclass(frozen=True)
class AeroModel:
    """Longitudinal stability/control derivatives plus mass and geometry.

    Derivatives are per radian. The alpha-dot column (``CDad``, ``CLad``,
    ``Cmad``) is not tabulated for this airframe and defaults to zero.

    ``force_reference`` selects the length multiplying ``qbar*S`` in the lift
    and drag rows: ``"chord"`` multiplies by the mean aerodynamic chord exactly
    as the pitching-moment row does, ``"area"`` uses the conventional
    ``qbar*S``. ``wind_transport`` toggles the wind-acceleration term in the
    translational equations.
    """

    CD0: float = _IDEAL["CD0"]
    CL0: float = _IDEAL["CL0"]
    Cm0: float = _IDEAL["Cm0"]
    CDa: float = _IDEAL["CDa"]
    CLa: float = _IDEAL["CLa"]
    Cma: float = _IDEAL["Cma"]
    CDu: float = _IDEAL["CDu"]
    CLu: float = _IDEAL["CLu"]
    Cmu: float = _IDEAL["Cmu"]
    CDq: float = _IDEAL["CDq"]
    CLq: float = _IDEAL["CLq"]
    Cmq: float = _IDEAL["Cmq"]
    CDde: float = _IDEAL["CDde"]
    CLde: float = _IDEAL["CLde"]
    Cmde: float = _IDEAL["Cmde"]
    CDad: float = 0.0
    CLad: float = 0.0
    Cmad: float = 0.0
    # geometry, mass and inertia
    S: float = 43.42
    cbar: float = 1.216
    b: float = 28.0
    mass: float = 18418.27
    Ix: float = 378056.535
    Iy: float = 4914073.496
    Iz: float = 5670084.803
    Ixz: float = 0.0
    V_P1: float = 160.0
    g: float = G0
    rho: float = RHO_SEA_LEVEL
    force_reference: str = "chord"
    wind_transport: bool = True

    def __post_init__(self):
        for name in ("S", "cbar", "b", "mass", "Ix", "Iy", "Iz", "V_P1", "rho"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.force_reference not in ("chord", "area"):
            raise ValueError(f"unknown force_reference {self.force_reference!r}")

    @classmethod
    def nominal(cls, **overrides) -> "AeroModel":
        return cls(**overrides)

    @classmethod
    def uncertain(cls, corrected: bool = True, **overrides) -> "AeroModel":
        """Derivative set perturbed for the model-uncertainty scenario.

        ``corrected=False`` uses the tabulated numbers verbatim, including
        ``CDu = 0.373`` and ``CDde = 1483``.
        """
        table = _UNCERTAIN_CORRECTED if corrected else _UNCERTAIN_LITERAL
        return cls(**{**table, **overrides})

    def scaled(self, factor: float) -> "AeroModel":
        """Copy with every aerodynamic derivative multiplied by ``factor``."""
        return replace(self, **{n: getattr(self, n) * factor for n in DERIVATIVE_NAMES})

    @property
    def inertia(self) -> np.ndarray:
        return np.array([[self.Ix, 0.0, self.Ixz],
                         [0.0, self.Iy, 0.0],
                         [self.Ixz, 0.0, self.Iz]])

    @property
    def weight(self) -> float:
        return self.mass * self.g

    def to_array(self) -> np.ndarray:
        p = np.empty(N_PARAMS)
        for k, name in enumerate(DERIVATIVE_NAMES):
            p[k] = getattr(self, name)
        p[P_S], p[P_CBAR], p[P_B], p[P_MASS] = self.S, self.cbar, self.b, self.mass
        p[P_IX], p[P_IY], p[P_IZ], p[P_IXZ] = self.Ix, self.Iy, self.Iz, self.Ixz
        p[P_VP1], p[P_G], p[P_RHO] = self.V_P1, self.g, self.rho
        p[P_FREF] = self.cbar if self.force_reference == "chord" else 1.0
        p[P_WIND_TRANSPORT] = 1.0 if self.wind_transport else 0.0
        return p

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AeroModel":
        """Build from a flat key-value mapping.

        The optional ``base`` key picks the starting dataset (``"ideal"``,
        ``"uncertain"`` or ``"uncertain_literal"``); other keys override it.
        """
        data = dict(data)
        base = data.pop("base", "ideal")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"unknown aircraft keys: {sorted(unknown)}")
        if base == "ideal":
            return cls(**data)
        if base == "uncertain":
            return cls.uncertain(corrected=True, **data)
        if base == "uncertain_literal":
            return cls.uncertain(corrected=False, **data)
        raise ValueError(f"unknown base dataset {base!r}")


def load_model(path) -> AeroModel:
    """Read an aircraft definition from a JSON file of key/value pairs."""
    with open(Path(path)) as fh:
        return AeroModel.from_dict(json.load(fh))


@dataclass
class AircraftState:
    """Rigid-body state. Velocities m/s, rates rad/s, angles rad, positions m."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    x: float = 0.0
    y: float = 0.0
    h: float = 0.0
    t: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w, self.p, self.q, self.r,
                         self.phi, self.theta, self.psi, self.x, self.y, self.h])

    @classmethod
    def from_array(cls, x, t: float = 0.0) -> "AircraftState":
        return cls(*(float(v) for v in x[:N_STATES]), t=float(t))

    @property
    def airspeed(self) -> float:
        return float(np.sqrt(self.u ** 2 + self.v ** 2 + self.w ** 2))

    @property
    def alpha(self) -> float:
        return float(np.arctan2(self.w, self.u))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_array()))) and np.isfinite(self.t)


@dataclass
class ControlInputs:
    """Elevator deflection (rad) and body-x thrust (N)."""

    delta_E: float = 0.0
    thrust: float = 0.0

    def __post_init__(self):
        self.delta_E = float(np.clip(self.delta_E, -ELEVATOR_LIMIT, ELEVATOR_LIMIT))
        if self.thrust < 0:
            raise ValueError("thrust must be non-negative")


@dataclass(frozen=True)
class TrimPoint:
    delta_E_trim: float
    thrust_trim: float
    alpha_trim: float
    V: float
    h: float
    gamma: float = 0.0

    @property
    def thrust_lbf(self) -> float:
        return self.thrust_trim / LBF_TO_N

    def state(self, x: float = 0.0, theta: float | None = None) -> AircraftState:
        """Wings-level state flying this trim (optionally with a different pitch)."""
        th = self.alpha_trim + self.gamma if theta is None else theta
        return AircraftState(u=self.V * np.cos(self.alpha_trim), w=self.V * np.sin(self.alpha_trim),
                             theta=th, x=x, h=self.h)

    def inputs(self) -> ControlInputs:
        return ControlInputs(self.delta_E_trim, self.thrust_trim)
