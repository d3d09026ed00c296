"""Exception hierarchy shared by all starweyl modules."""


class StarWeylError(Exception):
    """Base class for all starweyl failures."""


# --- indicial polynomial / exponents ---

class NonConvergence(StarWeylError):
    """Root iteration exceeded its iteration budget."""


class AdmissibilityViolation(StarWeylError):
    """Exponent set violates one of the admissibility exclusions.

    ``reason`` is one of ``"RealPartCollision"``, ``"DifferenceMultipleOfN"``,
    ``"ForbiddenIntegerExponent"``.
    """

    def __init__(self, reason, message):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


# --- sectors ---

class BoundaryArgument(StarWeylError):
    """arg(rho) sits on (or too near) a sector boundary: ordering ties."""


class ZeroBase(StarWeylError):
    """Principal power of zero requested."""


class DegenerateOmega(StarWeylError):
    """One of the Omega_k determinants is numerically zero."""


# --- series evaluation ---

class ResonantExponent(StarWeylError):
    """delta(xi + s*n) vanished in the coefficient recurrence."""


class TruncationFailure(StarWeylError):
    """Series term cap reached before the truncation rule was met."""


class WronskianDeviation(StarWeylError):
    """det of the collar basis matrix strayed too far from 1."""


# --- integration ---

class StepLimitExceeded(StarWeylError):
    """Adaptive integrator exceeded its step budget or failed to advance."""


class WronskianDrift(StarWeylError):
    """det of the propagated basis drifted beyond the trust threshold."""


# --- linear solves on the graph ---

class SingularSystem(StarWeylError):
    """Matching (or interior) system is exactly singular at this lambda."""


class SigmaSingular(StarWeylError):
    """A sigma_{skj} reconstruction system is singular at this lambda."""


class DenominatorSingular(StarWeylError):
    """An internal-Weyl-matrix denominator determinant vanished."""


class NoConvergence(StarWeylError):
    """Eigenvalue refinement did not reach the requested residual."""


class GridMismatch(StarWeylError):
    """Input Weyl grids were sampled on different lambda grids."""


# --- configuration / CLI ---

class SchemaError(StarWeylError):
    """Config document is missing fields or has wrongly typed values."""


class GuardViolation(StarWeylError):
    """lambda grid violates the collar or stiffness guards."""
