"""Exception types shared across the package."""


class PotalgError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(PotalgError, ValueError):
    """Potential parameters violate a family constraint."""


class UsageError(PotalgError, ValueError):
    """An operation was called with unusable arguments (empty grids, bad ranges)."""


class DomainError(PotalgError, ValueError):
    """Evaluation point lies outside the potential's domain."""


class SingularityError(DomainError):
    """Evaluation hit (or came numerically indistinguishable from) a pole."""


class BoundStateRangeError(PotalgError, ValueError):
    """Requested level index lies outside the finite bound-state ladder."""

    def __init__(self, n: int, n_max: int):
        self.n = n
        self.n_max = n_max
        super().__init__(
            f"level n={n} outside the bound-state ladder (largest allowed n_max={n_max})"
        )


class WrongEngineError(PotalgError, TypeError):
    """A real-arithmetic eigensolver was handed a complex operator."""


class NonConvergenceError(PotalgError, RuntimeError):
    """An iterative eigensolve or a grid-refinement ladder failed to converge."""

    def __init__(self, message: str, block_index: int | None = None):
        self.block_index = block_index
        super().__init__(message)
