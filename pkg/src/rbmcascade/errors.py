"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates a documented precondition."""


class SizeCapError(ContractError):
    """Exact enumeration requested beyond the hard state-count cap."""


class PhaseError(ContractError):
    """A mean-field solver was called outside its phase of validity.

    ``phase`` names the regime the parameters actually fall in
    (e.g. "paramagnetic", "pair-retrieval").
    """

    def __init__(self, message, phase):
        super().__init__(message)
        self.phase = phase


class NumericalAbort(RuntimeError):
    """A numerical procedure failed (non-convergence, NaN parameters)."""


class SchemaError(ValueError):
    """A file does not conform to its documented layout."""
