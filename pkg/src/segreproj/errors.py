"""Exception hierarchy shared by all modules."""


class SegreError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(SegreError, ZeroDivisionError):
    pass


class MixedFields(SegreError, TypeError):
    pass


class NotPrime(SegreError, ValueError):
    pass


class HeightExceeded(SegreError, ArithmeticError):
    """A rational exceeded the configured bit-length bound."""


class DimensionMismatch(SegreError, ValueError):
    pass


class HeterogeneousTuple(SegreError, ValueError):
    pass


class SingularMatrix(SegreError, ValueError):
    pass


class EmptyInput(SegreError, ValueError):
    pass


class AmbientMismatch(SegreError, ValueError):
    pass


class CenterContainsPoint(SegreError, ValueError):
    """The point lies in the center, where the projection is undefined."""


class ZeroVector(SegreError, ValueError):
    pass


class IndexOutOfRange(SegreError, IndexError):
    pass


class ZeroHyperplane(SegreError, ValueError):
    pass


class FieldTooSmall(SegreError, ValueError):
    pass


class GenericityViolation(SegreError, ValueError):
    pass


class CocycleViolation(SegreError, ValueError):
    pass


class PermDimMismatch(SegreError, ValueError):
    pass


class CoverageFailure(SegreError, RuntimeError):
    pass


class AveragingDegenerate(SegreError, RuntimeError):
    pass


class DegenerateSection(SegreError, ValueError):
    pass


class NoEquationFound(SegreError, RuntimeError):
    pass


class NoEquation(SegreError, ValueError):
    pass


class ConfigError(SegreError, ValueError):
    """Malformed command-line or file configuration."""


class NotStable(SegreError, ValueError):
    """A subspace expected to be invariant under the semilinear action is not."""
