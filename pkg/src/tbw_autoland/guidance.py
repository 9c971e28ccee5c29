"""Landing path: a straight glideslope that blends into a circular flare arc.

Along-track position ``x`` is measured in metres with touchdown at ``x_td``
(0 by default), so the approach is flown at negative ``x``. The flare
radius is set by a 0.1 g pull-up at the flare speed, the arc is tangent to
the glideslope at the flare entry and level at touchdown.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

from .aircraft import G0
from .errors import GeometryError

FT = 0.3048
TOUCHDOWN_SPEED = 161.0


@dataclass(frozen=True)
class LandingGeometry:
    theta_a: float  # deg
    V_stall: float
    V_TD: float
    V_f: float
    R: float
    h_f: float
    s_a: float
    s_f: float
    s_td: float
    screen_height: float
    h0: float
    x_td: float = 0.0

    @property
    def x_flare(self) -> float:
        return self.x_td + self.s_f

    @property
    def x_screen(self) -> float:
        return self.x_td + self.s_td

    @property
    def x_start(self) -> float:
        """Where the extended glideslope passes through the initial altitude."""
        return self.x_screen - (self.h0 - self.screen_height) / math.tan(math.radians(self.theta_a))

    def summary(self) -> dict:
        return {k: round(v, 6) if isinstance(v, float) else v for k, v in asdict(self).items()}


class DesiredState(NamedTuple):
    h: float
    dh_dx: float
    theta: float
    touchdown: bool


def plan_landing(V_stall: float = TOUCHDOWN_SPEED / 1.15, theta_a: float = 3.0, h0: float = 100.0,
                 screen_height: float = 50.0, x_td: float = 0.0, g: float = G0) -> LandingGeometry:
    """Glideslope and flare geometry for approach angle ``theta_a`` (deg).

    ``screen_height`` is in metres; pass ``50 * 0.3048`` for the 50 ft reading.
    """
    if not V_stall > 0:
        raise ValueError("stall speed must be positive")
    if not 0 < theta_a <= 3:
        raise ValueError("approach angle must lie in (0, 3] deg")
    ta = math.radians(theta_a)
    V_f = 1.23 * V_stall
    R = V_f ** 2 / (0.2 * g)
    h_f = R - R * math.cos(ta)
    if h_f >= screen_height:
        raise GeometryError(f"flare height {h_f:.2f} m reaches the {screen_height} m screen height")
    s_a = -(screen_height - h_f) / math.tan(ta)
    s_f = -R * math.sin(ta)
    return LandingGeometry(theta_a=theta_a, V_stall=V_stall, V_TD=1.15 * V_stall, V_f=V_f, R=R,
                           h_f=h_f, s_a=s_a, s_f=s_f, s_td=s_a + s_f,
                           screen_height=screen_height, h0=h0, x_td=x_td)


def desired_state(x: float, geom: LandingGeometry) -> DesiredState:
    """Reference altitude, slope dh/dx and pitch at along-track position ``x``.

    Past touchdown the reference holds at ground level with ``touchdown`` set.
    """
    dx = x - geom.x_td
    if dx > 0:
        return DesiredState(0.0, 0.0, 0.0, True)
    ta = math.radians(geom.theta_a)
    if x >= geom.x_flare:
        root = math.sqrt(geom.R ** 2 - dx ** 2)
        return DesiredState(geom.R - root, dx / root, math.asin(dx / geom.R), False)
    return DesiredState(geom.h_f + (geom.x_flare - x) * math.tan(ta), -math.tan(ta), -ta, False)
