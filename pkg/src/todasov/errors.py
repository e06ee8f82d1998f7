"""Failure types raised by the numerical layers.

Every recoverable numerical failure is signalled by one of these rather
than by a silent wrong answer; callers that batch work (the CLI identity
suites) catch TodaError subclasses and report them as failures.
"""


class TodaError(Exception):
    """Base class for all package-specific failures."""


class NonRealRoot(TodaError):
    """A root that must be real for the reality class has nonzero imaginary part."""


class DegenerateCurve(TodaError):
    """Branch points collide (or nearly so): the spectral curve has no clean zone structure."""


class QuadratureFailure(TodaError):
    """Node-doubling (or window-doubling) estimates disagree beyond tolerance."""


class StepFailure(TodaError):
    """The adaptive ODE integrator could not reach the requested time."""


class ResolutionFailure(TodaError):
    """Grid refinement of the eigensolver did not converge to tolerance."""


class SignAmbiguity(TodaError):
    """Neither sign candidate is a clear winner for the Baxter residual."""


class BracketFailure(TodaError):
    """Root bracketing for the quantization condition failed."""


class ConvergenceFailure(TodaError):
    """An iterative refinement loop ran out of budget before reaching tolerance."""
