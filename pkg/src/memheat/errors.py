"""Exception hierarchy.

Configuration problems raise :class:`ConfigError` subclasses (CLI exit code 1);
numerical failures raise :class:`NumericalError` subclasses (CLI exit code 2).
"""


class MemheatError(Exception):
    """Base class for all package errors."""


class ConfigError(MemheatError):
    """Bad user input: unreadable or invalid configuration."""


class ParseError(ConfigError):
    """Config file could not be parsed; message carries line/key context."""


class ValidationError(ConfigError):
    """Config parsed but violates constraints; lists every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalError(MemheatError):
    """A numerical method failed in a detectable way."""


# --- kernel / transform domain ---

class NonpositiveRealPart(NumericalError):
    """Laplace evaluation requested at Re z <= 0."""


class QuadratureDivergence(NumericalError):
    """Sampled kernel grows too fast for the requested Re z to damp."""


class EmptySignal(NumericalError):
    """Operation on a signal with fewer than two samples."""


class SymmetryViolation(NumericalError):
    """Imaginary residual of an inversion exceeded tolerance (branch/contour bug)."""


class NonconvergentSum(NumericalError):
    """Contour-sum terms not decaying / no agreement under node doubling."""


class TruncationBeyondHorizon(NumericalError):
    """Projection time exceeds the recorded signal horizon."""


class SlowDecay(NumericalError):
    """Axis integrand tail is not O(1/y^2); cutoff error uncontrolled."""


# --- forward solvers ---

class KernelZero(NumericalError):
    """K(z) vanished at a queried point; omega undefined."""


class BranchViolation(NumericalError):
    """Re omega <= 0 where the principal branch should be positive."""


class NearPole(NumericalError):
    """sinh(omega L) too small: z is on the excluded resonance set."""


class CFLViolation(NumericalError):
    """Time step does not resolve the wavefront: a*dt > dx."""


class UnstableStep(NumericalError):
    """Field norm grew beyond the divergence threshold in one step."""


# --- inverse problem ---

class ZeroResponse(NumericalError):
    """Response value is zero; K = z F^2 / R^2 undefined."""


class BranchMismatch(NumericalError):
    """Recovered K does not reproduce the measured response sign."""


class NewtonDivergence(NumericalError):
    """Complex Newton iteration failed after damping and multistart."""


class WrongHalfPlane(NumericalError):
    """Newton converged to a root with Re omega <= 0."""


class K0Violation(NumericalError):
    """z*K(z) does not stabilise; leading-order wave speed undefined."""


class InsufficientHorizon(NumericalError):
    """No frequency passes the truncation-error gate for the observed horizon."""
