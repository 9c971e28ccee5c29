"""Exception types raised by the simulator, solvers and learners."""


class SimulationDiverged(RuntimeError):
    """Non-finite output, Euler singularity, or an airspeed precondition broken."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class TrimFailure(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ControllerFault(RuntimeError):
    """A controller was asked to act outside the region where its law is defined."""


class LearningDiverged(RuntimeError):
    def __init__(self, message, episode=None, step=None):
        super().__init__(message)
        self.episode = episode
        self.step = step


class GeometryError(ValueError):
    """Landing geometry that cannot be flown (e.g. flare taller than the screen height)."""
