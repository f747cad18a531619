"""Exception hierarchy shared by every module in the package."""


class PoissonBathError(Exception):
    """Base class for all errors raised by :mod:`poissonbath`."""


class DimensionMismatch(PoissonBathError, ValueError):
    pass


class NonHermitianInput(PoissonBathError, ValueError):
    pass


class NonHermitianHamiltonian(NonHermitianInput):
    pass


class NegativeRate(PoissonBathError, ValueError):
    pass


class InvalidState(PoissonBathError, ValueError):
    """Raised when an array fails the density-matrix checks."""


class CostGuardExceeded(PoissonBathError, ValueError):
    pass


class SizeGuardExceeded(CostGuardExceeded):
    pass


class NumericalError(PoissonBathError, ArithmeticError):
    """Base class for failures of a numerical routine (as opposed to bad input)."""


class Overflow(NumericalError, OverflowError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class DegenerateKernel(NumericalError):
    def __init__(self, message, kernel_dim=None):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class NoPhysicalState(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass
