"""Exception types raised by the simulator."""


class GapburstError(Exception):
    """Base class for all package errors."""


class InvalidParameter(GapburstError):
    """A scalar argument is outside its allowed range."""


class MinimumSeparationViolated(GapburstError):
    """Two atoms are closer than the configured minimum separation."""


class DegenerateInitialState(GapburstError):
    """Initial state lies outside the Bloch ball."""


class NonpositiveGamma(GapburstError):
    """Collective width is zero or negative; the filtered drive diverges."""


class StepSizeTooLarge(GapburstError):
    """Integrator left the Bloch ball by more than the allowed tolerance."""


class HistoryUnderflow(GapburstError):
    """A retardation delay is shorter than the integration step."""


class EmptySeries(GapburstError):
    """A time series has too few samples for the requested analysis."""


class NotStationary(GapburstError):
    """Trailing window of a series has not settled onto a plateau."""


class NoFixedPointInGainRegime(GapburstError):
    """Stationary-state bracket failed to locate a root."""


class ConfigError(GapburstError):
    """Configuration file could not be parsed or validated.

    ``problems`` lists every issue found, not just the first.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
