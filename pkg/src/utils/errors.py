"""
Exception hierarchy for the Heavy Anchor toolkit.

Every error raised by the library derives from HeavyAnchorError. Input errors
also derive from ValueError and numerical failures from RuntimeError so callers
that only know the builtin types keep working.
"""
from typing import Any, List, Optional


class HeavyAnchorError(Exception):
    """Root of all toolkit errors."""


class DimensionError(HeavyAnchorError, ValueError):
    """A vector or matrix has the wrong length for the game it is used with."""

    def __init__(self, message: str, expected: Optional[int] = None, actual: Optional[int] = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class SingularSystemError(HeavyAnchorError, ValueError):
    """The linear system defining an equilibrium has no unique solution."""

    def __init__(self, message: str, rank: Optional[int] = None, size: Optional[int] = None):
        super().__init__(message)
        self.rank = rank
        self.size = size


class GraphConstructionError(HeavyAnchorError, ValueError):
    """Weights do not describe an undirected, nonnegatively weighted graph."""


class DisconnectedGraphError(HeavyAnchorError, ValueError):
    """The communication graph has more than one connected component."""

    def __init__(self, message: str, components: Optional[List[List[int]]] = None):
        super().__init__(message)
        self.components = components or []


class InfeasibleParametersError(HeavyAnchorError):
    """No parameter choice satisfies the requested convergence condition."""

    def __init__(self, message: str, reason: Optional[str] = None, blocking: Any = None):
        super().__init__(message)
        self.reason = reason or message
        self.blocking = blocking


class ConvergenceError(HeavyAnchorError, RuntimeError):
    """An inner iterative solve did not reach its residual target."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class SimulationDivergedError(HeavyAnchorError, RuntimeError):
    """The integrated state became non-finite."""

    def __init__(self, message: str, time: Optional[float] = None, trajectory: Any = None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


class ConfigError(HeavyAnchorError, ValueError):
    """A scenario configuration value is missing or invalid."""

    def __init__(self, message: str, field_path: Optional[str] = None):
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
        self.field_path = field_path


class VerificationError(HeavyAnchorError):
    """A property check or reference comparison failed."""

    def __init__(self, message: str, failures: Optional[List[str]] = None):
        super().__init__(message)
        self.failures = failures or []


class SamplingError(HeavyAnchorError, ValueError):
    """Every sampled pair was degenerate, so no estimate could be formed."""


class DerivationError(HeavyAnchorError, ValueError):
    """A property derivation was requested without the inputs or flags it needs."""
