"""Exception and warning types raised by the numerical core."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure."""


class TruncationError(NumericalError):
    def __init__(self, cap: int, tail_bound: float):
        self.cap = cap
        self.tail_bound = tail_bound
        super().__init__(
            f"ladder reached the hard cap of {cap} rungs with tail bound "
            f"{tail_bound:.3e} still above tolerance"
        )


class NonNormalizableError(NumericalError):
    """Steady-state recursion does not decay, so no normalizable solution exists."""


class InstabilityError(NumericalError):
    def __init__(self, message: str, suggested_dt: float):
        self.suggested_dt = suggested_dt
        super().__init__(f"{message}; try dt <= {suggested_dt:.3e}")


class ValidityWarning(UserWarning):
    """An approximation is being used outside its stated range of validity."""
