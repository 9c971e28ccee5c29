"""Elevator actuator degradation: a piecewise gain and bias on the command."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aircraft import ELEVATOR_LIMIT


@dataclass(frozen=True)
class FaultSegment:
    t_start: float
    gain: float
    bias: float  # rad


@dataclass(frozen=True)
class FaultSchedule:
    """Segments sorted by start time.

    A segment governs ``(t_start, t_next]``, so an instant exactly on a
    boundary still belongs to the earlier segment (or to the healthy
    actuator before the first one).
    """

    segments: tuple[FaultSegment, ...] = ()

    def __post_init__(self):
        starts = [s.t_start for s in self.segments]
        if starts != sorted(starts) or len(set(starts)) != len(starts):
            raise ValueError("fault segments must have strictly increasing start times")
        for s in self.segments:
            if not 0 < s.gain <= 1:
                raise ValueError(f"fault gain {s.gain} outside (0, 1]")

    @classmethod
    def from_triples(cls, triples) -> "FaultSchedule":
        """Build from ``(t_start_s, gain, bias_deg)`` triples."""
        return cls(tuple(FaultSegment(float(t), float(k), math.radians(b)) for t, k, b in triples))

    def to_triples(self):
        return [[s.t_start, s.gain, math.degrees(s.bias)] for s in self.segments]

    def active(self, t: float) -> FaultSegment | None:
        current = None
        for seg in self.segments:
            if t > seg.t_start:
                current = seg
            else:
                break
        return current


HEALTHY = FaultSchedule()

# The degradation schedule as written in the equation: worsening every 4 s
EQUATION_SCHEDULE = FaultSchedule.from_triples([
    (4.0, 0.5, -0.5),
    (8.0, 0.4, 0.6),
    (12.0, 0.3, -0.7),
])

# The variant described in the accompanying prose (60 deg bias after 4 s,
# 30 % deficiency after 8 s); kept only for comparison runs
PROSE_SCHEDULE = FaultSchedule.from_triples([
    (4.0, 0.5, 60.0),
    (8.0, 0.7, 0.6),
    (12.0, 0.3, -0.7),
])


def apply_fault(delta_E_cmd: float, t: float, schedule: FaultSchedule = EQUATION_SCHEDULE) -> float:
    """Effective elevator deflection (rad) for a commanded one at time ``t``."""
    if t < 0:
        raise ValueError("time must be non-negative")
    seg = schedule.active(t)
    out = delta_E_cmd if seg is None else seg.gain * delta_E_cmd + seg.bias
    return min(max(out, -ELEVATOR_LIMIT), ELEVATOR_LIMIT)
