"""Exception hierarchy.

Every error raised by the library derives from :class:`KyFanError`.
Errors caused by inputs that are well-formed but violate a mathematical
invariant derive from :class:`ValidationError`; the CLI maps those to exit
code 2.
"""


class KyFanError(Exception):
    """Base class for all library errors."""


class ValidationError(KyFanError):
    """An input violates a documented invariant."""


class UsageError(KyFanError):
    """An argument is outside the accepted range (e.g. ``k``)."""


# matrix core
class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    def __init__(self, residual: float):
        super().__init__(f"NotHermitian(residual={residual:.3e})")
        self.residual = residual


class NoConvergence(KyFanError):
    pass


class InvalidRank(UsageError):
    pass


class NotFinite(ValidationError):
    pass


# states
class NotPositive(ValidationError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"NotPositive({min_eigenvalue:+.6g})")
        self.min_eigenvalue = min_eigenvalue


class TraceNotOne(ValidationError):
    def __init__(self, deviation: float):
        super().__init__(f"TraceNotOne({deviation:+.6g})")
        self.deviation = deviation


class OutsideBall(ValidationError):
    pass


class WrongDimension(ValidationError):
    pass


# distances
class DimensionMismatch(ValidationError):
    pass


class KOutOfRange(UsageError):
    pass


class LengthMismatch(ValidationError):
    pass


class NotDistribution(ValidationError):
    pass


# measurements
class ElementNotPositive(ValidationError):
    def __init__(self, index: int, min_eigenvalue: float):
        super().__init__(f"ElementNotPositive(index={index}, min_eigenvalue={min_eigenvalue:+.3e})")
        self.index = index
        self.min_eigenvalue = min_eigenvalue


class CompletenessViolated(ValidationError):
    def __init__(self, residual: float):
        super().__init__(f"CompletenessViolated(residual={residual:.3e})")
        self.residual = residual


class SingularNormalizer(KyFanError):
    pass


# majorization
class NegativeEntry(ValidationError):
    pass


class HypothesisViolated(ValidationError):
    pass


# channels
class ShapeMismatch(ValidationError):
    pass


class TraceIncreasing(ValidationError):
    def __init__(self, excess: float):
        super().__init__(f"TraceIncreasing(excess={excess:.3e})")
        self.excess = excess


class NotTracePreserving(ValidationError):
    pass


class ZeroTrace(ValidationError):
    pass


class ParameterOutOfRange(UsageError):
    pass


# harness / cli
class UnknownSuite(UsageError):
    pass


class OracleReturnedInvalidState(ValidationError):
    pass


class ParseError(KyFanError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
