"""Exception and warning types raised across the package."""


class RealDiracError(Exception):
    """Base class for all errors raised by :mod:`realdirac`."""


class NonRealResult(RealDiracError):
    """Encoding left an imaginary residue; the S-map is inconsistent."""


class ConjugacyViolation(RealDiracError):
    """A decoded pair violates ``phi_b = N_b conj(phi_a)``."""


class SupercriticalCoupling(RealDiracError, ValueError):
    """``(Z alpha)**2 >= kappa**2``; no bound state of that symmetry exists."""


class InvalidState(RealDiracError, ValueError):
    """Quantum numbers do not label a bound state."""


class SolverError(RealDiracError):
    """Base class for radial eigenvalue failures."""


class NoConvergence(SolverError):
    """The energy bracket was exhausted without isolating an eigenvalue."""


class GridTooCoarse(SolverError):
    """The radial grid cannot resolve the requested state."""


class OutOfGrid(RealDiracError, ValueError):
    """An evaluation point lies outside the radial grid."""


class GridMismatch(RealDiracError, ValueError):
    """Fields defined on different radial grids were combined."""


class ExpansionDomain(RealDiracError, ValueError):
    """The coupling reaches magnitude one where a power series is needed."""


class NotStationary(RealDiracError, ValueError):
    """A stationary-state computation received a modulated density."""


class ZeroStateWarning(RuntimeWarning):
    """A norm was requested for an identically zero field."""
