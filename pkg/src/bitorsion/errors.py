"""Exception types. The CLI maps these onto its exit codes."""


class TorsionError(Exception):
    """Base class for errors raised by this package."""


class InputError(TorsionError, ValueError):
    """Malformed or inconsistent input data."""


class AmbiguousRankError(InputError):
    pass


class NotInSpanError(InputError):
    pass


class BasisError(InputError):
    """A supplied (co)homology basis is not a basis, or is missing."""


class EigenvalueError(TorsionError, ArithmeticError):
    pass


class BranchCutError(TorsionError, ArithmeticError):
    """An eigenvalue sits on the cut of the principal logarithm."""


class ThresholdCollision(TorsionError):
    """An eigenvalue has real part (numerically) equal to the threshold."""

    def __init__(self, eigenvalue: complex, threshold: float, degree: int | None = None):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        self.degree = degree
        where = "" if degree is None else f" in degree {degree}"
        super().__init__(
            f"eigenvalue {eigenvalue:.6g}{where} has real part at threshold K={threshold:g}")

    def in_degree(self, degree: int) -> "ThresholdCollision":
        return ThresholdCollision(self.eigenvalue, self.threshold, degree)
