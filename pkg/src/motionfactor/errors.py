"""Exception hierarchy shared by all modules."""


class MotionFactorError(Exception):
    """Base class for every error raised by this package."""


class NotInvertible(MotionFactorError):
    pass


class NotADisplacement(MotionFactorError):
    pass


class NotARotation(MotionFactorError):
    pass


class RealRootFound(MotionFactorError):
    def __init__(self, t0: float):
        super().__init__(f"real root at t = {t0!r}")
        self.t0 = t0


class OddDegree(MotionFactorError):
    pass


class NotMotionPolynomial(MotionFactorError):
    pass


class LeadingNotInvertible(MotionFactorError):
    pass


class NotMonic(MotionFactorError):
    pass


class NonGeneric(MotionFactorError):
    pass


class RemainderNotInvertible(MotionFactorError):
    def __init__(self, remainder, message: str = "linear remainder has non-invertible leading coefficient"):
        super().__init__(message)
        self.remainder = remainder


class ResidualTooLarge(MotionFactorError):
    def __init__(self, residual: float):
        super().__init__(f"reconstruction residual {residual:.3e} above tolerance")
        self.residual = residual


class NoSolution(MotionFactorError):
    pass


class FamilyOfSolutions(MotionFactorError):
    pass


class DegenerateZeroParameter(MotionFactorError):
    pass


class FlipDegenerate(MotionFactorError):
    pass


class NoQuadraticFactorization(MotionFactorError):
    pass


class BraceDegenerate(MotionFactorError):
    pass


class InvalidLoop(MotionFactorError):
    pass


class IdenticalAxes(MotionFactorError):
    pass


class PoleAtParameter(MotionFactorError):
    def __init__(self, t: float):
        super().__init__(f"trajectory has a pole at t = {t!r}")
        self.t = t


class ParseError(MotionFactorError):
    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
