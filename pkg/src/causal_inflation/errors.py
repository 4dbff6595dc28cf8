"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a structural invariant (bad graph, bad table, bad file)."""


class InflationError(ValidationError):
    """A candidate inflation fails the local parentage condition."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class CapacityError(RuntimeError):
    """An enumeration grew past its configured size cap."""
