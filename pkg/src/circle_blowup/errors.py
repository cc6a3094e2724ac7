"""Exception types raised across the package.

Every error carries a stable ``code`` string so the command line front end
and the tests can match on it without parsing messages.
"""


class BlowupError(Exception):
    code = "ERROR"

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context

    def __str__(self):
        base = super().__str__()
        if self.context:
            extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{self.code}: {base} ({extra})"
        return f"{self.code}: {base}"


class ResolutionTooCoarse(BlowupError):
    code = "RESOLUTION_TOO_COARSE"


class NotStationary(BlowupError):
    code = "NOT_STATIONARY"


class HypothesisH1Violated(BlowupError):
    code = "HYPOTHESIS_H1_VIOLATED"


class NonpositiveCurvature(BlowupError):
    code = "NONPOSITIVE_CURVATURE"


class Degenerate(BlowupError):
    code = "DEGENERATE"


class Tangential(BlowupError):
    code = "TANGENTIAL"


class WrongBranch(BlowupError):
    code = "WRONG_BRANCH"


class NoConvergence(BlowupError):
    code = "NO_CONVERGENCE"


class SingularJacobian(BlowupError):
    code = "SINGULAR_JACOBIAN"


class FitDiverged(BlowupError):
    code = "FIT_DIVERGED"


class FixedPointDiverged(BlowupError):
    code = "FIXED_POINT_DIVERGED"
