"""Pitch-attitude autolanding for a truss-braced-wing transport.

Six-degree-of-freedom flight dynamics with Dryden turbulence, a glideslope
and flare planner, a dynamic inversion baseline, and tabular and fuzzy
Q-learning attitude controllers, plus the scenario harness that compares
them.
"""

__version__ = "0.1.0"

from .aircraft import AeroModel, AircraftState, ControlInputs, TrimPoint  # noqa: E402
from .trim import linearize_longitudinal, solve_trim  # noqa: E402

__all__ = ["AeroModel", "AircraftState", "ControlInputs", "TrimPoint", "linearize_longitudinal",
           "solve_trim", "__version__"]
