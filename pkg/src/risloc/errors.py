"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(SimulationError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateGeometryError(SimulationError):
    """Target placement for which the sensing parameters are undefined."""


class InfeasibleDelayError(SimulationError):
    """A total delay too short to correspond to any physical target."""


class NoSolutionError(SimulationError):
    """Ray and ellipse do not intersect in the admissible half-plane."""


class UndefinedMetricError(SimulationError):
    """A metric requested over a batch that contains no usable pairs."""


class ConfigError(SimulationError):
    """Invalid sweep configuration; message carries the offending field path."""


class SceneGenerationError(SimulationError):
    """Rejection sampling could not satisfy the scene constraints."""
