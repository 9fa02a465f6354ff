"""Exception types shared across the package."""


class SwarmstageError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SwarmstageError):
    """Invalid configuration: bad bounds, schedule, stage plan, or config file.

    May carry multiple violation messages so callers can report every
    problem at once.
    """

    def __init__(self, *messages: str):
        self.messages = [m for m in messages if m]
        super().__init__("; ".join(self.messages) if self.messages else "invalid configuration")


class EvaluationError(SwarmstageError):
    """An objective evaluation produced a non-finite value."""

    def __init__(self, message: str, particle_index: int | None = None, position=None):
        super().__init__(message)
        self.particle_index = particle_index
        self.position = position
