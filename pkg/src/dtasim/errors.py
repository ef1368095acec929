"""Exception hierarchy shared across the package."""


class DtaSimError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DtaSimError, ValueError):
    """An input violates a documented invariant (bad field, bad length)."""


class ScenarioError(ValidationError):
    """A scenario file failed to parse or validate; message carries context."""


class DegenerateShareError(DtaSimError, ArithmeticError):
    """A normalized share has an all-zero denominator (sum <= 1e-12)."""

    def __init__(self, what: str, epoch: int | None = None):
        self.what = what
        self.epoch = epoch
        suffix = f" at epoch {epoch}" if epoch is not None else ""
        super().__init__(f"degenerate {what} denominator (sum <= 1e-12){suffix}")


class InfeasibleAllocationError(DtaSimError, ValueError):
    """The exact optimizer has no feasible point for the given instance."""
