"""Exception hierarchy shared by every slidingdg package."""

from typing import Any


class SlidingDGError(Exception):
    """Base class for all errors raised by slidingdg."""


class ConfigurationError(SlidingDGError, ValueError):
    """A rejected input: bad degree, mesh, case, boundary or rank count."""


class InvalidStateError(SlidingDGError, ValueError):
    """A flow state with nonpositive density, pressure or speed of sound."""

    def __init__(self, message: str, values: dict[str, Any] | None = None):
        super().__init__(message)
        self.values = values or {}

    def __reduce__(self):
        return (self.__class__, (self.args[0], self.values))


class ProtocolError(SlidingDGError, RuntimeError):
    """Broken exchange bookkeeping: payload size mismatch or bad rank-map lookup."""


class TransportError(SlidingDGError, RuntimeError):
    """A transport backend failed or a peer rank went away."""


class SolverAbort(SlidingDGError, RuntimeError):
    """The time integration hit a nonphysical or non-finite state."""

    def __init__(
        self,
        message: str,
        rank: int | None = None,
        step: int | None = None,
        stage: int | None = None,
        element: int | None = None,
    ):
        location = ", ".join(
            f"{key}={value}"
            for key, value in (
                ("rank", rank),
                ("step", step),
                ("stage", stage),
                ("element", element),
            )
            if value is not None
        )
        super().__init__(f"{message} ({location})" if location else message)
        self.message = message
        self.rank = rank
        self.step = step
        self.stage = stage
        self.element = element

    def __reduce__(self):
        return (self.__class__, (self.message, self.rank, self.step, self.stage, self.element))
