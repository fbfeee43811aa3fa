class EngineError(Exception):
    """Base class for every error raised by the verification engine"""


# Exact ring
class NotDivisible(EngineError):
    pass


class UnassignedSymbol(EngineError):
    pass


class ZeroAtNegativeExponent(EngineError):
    pass


# Series and expansions
class NotInvertibleInRegion(EngineError):
    pass


class IncompatibleRegions(EngineError):
    pass


class PoleOnContour(EngineError):
    pass


class GenericityViolation(EngineError):
    pass


class UnsupportedPoleGeometry(EngineError):
    pass


# Theta functions and kernels
class MixedVariableFactor(EngineError):
    pass


class InvalidCombination(EngineError):
    pass


class DivisibilityViolation(EngineError):
    pass


class MismatchWithPlainGamma(EngineError):
    pass


# Pushforwards
class CoincidentRoots(EngineError):
    pass


# Surface
class ConfigError(EngineError):
    pass


class ExpressionSyntaxError(EngineError):
    def __init__(self, message: str, column: int, expected: str = ""):
        super().__init__(message)
        self.column = column
        self.expected = expected


class ExpressionTypeError(EngineError):
    pass
