"""Exception types shared across the solver modules."""


class DsmError(Exception):
    """Base class for solver failures (as opposed to caller mistakes)."""


class LinearSolveError(DsmError):
    """Shifted linear solve failed its factorization or residual certificate.

    Raised when factorizing J + a*I breaks down or the computed solution
    fails the residual check. Either way the monotonicity precondition
    (positive semidefinite symmetric part of J) is suspect; the failure is
    reported rather than patched.
    """


class InadmissibleScheduleError(DsmError):
    """Regularizer schedule violates the admissibility conditions."""


class NewtonError(DsmError):
    """Damped Newton ran out of iterations or line-search reductions.

    Carries the best iterate seen so far and its residual norm so callers
    can diagnose whether the tolerance was too tight for the problem.
    """

    def __init__(self, message, best, residual_norm, iterations):
        super().__init__(message)
        self.best = best
        self.residual_norm = residual_norm
        self.iterations = iterations


class ContinuationError(DsmError):
    """Continuation toward a -> 0 failed; carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
