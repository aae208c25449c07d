"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class UndefinedMetricError(DomainError):
    """A metric is undefined for the given maps (e.g. a constant map)."""


class MapNotFoundError(LookupError):
    """No stored saliency map exists for the requested key."""

    def __init__(self, key, path=None):
        self.key = key
        self.path = path
        msg = f"no stored map for key {key!r}"
        if path is not None:
            msg += f" (expected {path})"
        super().__init__(msg)


class SolverError(RuntimeError):
    """The iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message}: residual {residual:.3e} after {iterations} iterations")
