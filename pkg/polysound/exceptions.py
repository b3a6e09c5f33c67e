from polysound.config import EXIT_CODES


class PolysoundError(Exception):
    """
    Base class for every error raised by polysound.
    """

    exit_code = 1

    def __init__(self, message="", n_eq=None):
        super().__init__(message)
        self.n_eq = n_eq

    def at_density(self, n_eq):
        """
        Return a copy of the error with the offending density attached.

        Args:
        - n_eq (float): The density at which the error was raised.

        Returns:
        - PolysoundError: Same class, message suffixed with the density.
        """
        return type(self)(f"{self} (at n_eq={n_eq!r})", n_eq=n_eq)


class DomainError(PolysoundError, ValueError):
    exit_code = EXIT_CODES["usage"]


class DegenerateInput(DomainError):
    """No positive root exists, e.g. lambda=0 at zero density."""


class ResonanceError(DomainError):
    """Magnetic field sits exactly on the Feshbach resonance."""


class SubcriticalWidth(DomainError):
    """Width below lambda^(1/4) a, where the sound velocity is imaginary."""


class InsufficientData(DomainError):
    pass


class InvalidWindow(DomainError):
    pass


class UsageError(PolysoundError, ValueError):
    exit_code = EXIT_CODES["usage"]

    def __init__(self, message="", key=None, n_eq=None):
        super().__init__(message, n_eq=n_eq)
        self.key = key


class CFLViolation(UsageError):
    pass


class ConvergenceFailure(PolysoundError, RuntimeError):
    exit_code = EXIT_CODES["convergence"]


class SimulationInstability(PolysoundError, RuntimeError):
    exit_code = EXIT_CODES["instability"]


class DensityFloorViolation(SimulationInstability):
    pass
