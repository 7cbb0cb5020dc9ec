"""Exception types shared across the package."""


class ConeLpvError(Exception):
    """Base class for all errors raised by cone_lpv."""


class ContractError(ConeLpvError):
    """An argument violates a documented precondition (shape, range, structure)."""


class StructureMismatch(ContractError):
    """Two block-diagonal values do not share the same block structure."""


class InvalidSystemError(ContractError):
    """A polytopic system failed validation; carries the findings."""

    def __init__(self, findings):
        self.findings = list(findings)
        super().__init__("invalid system: " + "; ".join(self.findings))


class BudgetExceeded(ContractError):
    """An enumeration budget guard was hit before starting the computation."""


class NumericalFailure(ConeLpvError):
    """A numerical routine failed to converge or produced non-finite values."""
