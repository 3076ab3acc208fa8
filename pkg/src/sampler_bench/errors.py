"""Exception types shared across the toolkit."""


class SamplerBenchError(Exception):
    """Base class for toolkit errors."""


class FormatError(SamplerBenchError):
    """A map, prior, or results file is malformed."""


class InfeasibleProblemError(SamplerBenchError):
    """No feasible start/goal pair or no path exists."""


class EmptyPriorError(SamplerBenchError):
    """A probability map has no positive weight on free cells."""


class EmptyFreeSpaceError(SamplerBenchError):
    """The grid contains no free cells to sample from."""


class EllipseExhaustedError(SamplerBenchError):
    """No free sample could be drawn inside the informed ellipse."""


class ConfigurationError(SamplerBenchError):
    """An experiment spec references missing or inconsistent inputs."""
