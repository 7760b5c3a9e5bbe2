"""Exception types shared across the package."""


class MomentError(ValueError):
    """Invalid moment data or parameters."""


class InsufficientMomentsError(MomentError):
    """The sequence is too short for the requested level."""

    def __init__(self, needed, available):
        super().__init__(
            f"need moments up to degree {needed}, sequence stops at degree {available}"
        )
        self.needed = needed
        self.available = available


class BreakdownError(ArithmeticError):
    """Three-term recurrence broke down: the measure has finitely many atoms."""

    def __init__(self, index, requested=None):
        msg = f"recurrence breakdown at index {index} ({index} atoms detected)"
        if requested is not None:
            msg += f"; order {requested} requested"
        super().__init__(msg)
        self.index = index
        self.requested = requested


class CertificateUnavailable(ArithmeticError):
    """No dual certificate can be built (singular moment matrix or empty kernel)."""
