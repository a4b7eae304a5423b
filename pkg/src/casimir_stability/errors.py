"""Exception hierarchy shared by all modules.

Three families matter to callers (and map to CLI exit codes):

* ``DomainError`` -- inputs violate a precondition (exit 2).
* ``NumericalFailure`` -- a quadrature or integrator failed to converge (exit 3).
* ``PhysicalInstability`` -- the physics itself is unstable (exit 4).
"""


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain of the operation."""


class ZeroField(DomainError):
    """The mode field integrates to zero, so the capacitance is degenerate."""


class ZeroCurl(DomainError):
    """The curl of the mode field integrates to zero (infinite inductance)."""


class NonPositiveTemperature(DomainError):
    pass


class NonPositiveFrequency(DomainError):
    """The instantaneous squared frequency became non-positive."""


class NumericalFailure(CasimirError, ArithmeticError):
    """A numerical method did not reach its requested accuracy."""


class QuadratureFailure(NumericalFailure):
    pass


class IntegratorFailure(NumericalFailure):
    pass


class TruncationNotConverged(NumericalFailure):
    pass


class PhysicalInstability(CasimirError):
    """The requested quantity does not exist because the system is unstable."""


class UnstableStatic(PhysicalInstability):
    """Pi(0) >= Omega_inf**2: the renormalized frequency is not real."""


class ZeroNonlinearity(PhysicalInstability):
    """The two-photon coefficient vanishes, so the occupation never saturates."""


class PoleProximityWarning(RuntimeWarning):
    """The propagator was evaluated on or very near its pole."""
