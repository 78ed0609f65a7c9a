"""Exception hierarchy shared across the package."""


class QDTError(Exception):
    """Base class for every error raised by qdt."""


class DimensionError(QDTError, ValueError):
    """Shapes do not match, do not factor, or exceed the size guard."""


class SpaceMismatchError(QDTError, ValueError):
    """An event, state or prospect lives on a different Hilbert space."""


class NormalizationError(QDTError, ValueError):
    """A probability-like quantity cannot be normalized (zero mass, bad sums)."""


class AmbiguousRankingError(QDTError, ValueError):
    """The attraction heuristic cannot order two lotteries."""


class ConvergenceError(QDTError, RuntimeError):
    """An iterative projection did not reach its constraints."""


class InvariantViolation(QDTError, AssertionError):
    """A numerical identity that must hold was found broken."""


class ConfigError(QDTError, ValueError):
    """Bad experiment configuration. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, kind: str = "semantic"):
        self.line = line
        self.kind = kind
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{kind} error: {where}{message}")
