"""Exception hierarchy shared by every layer of the package."""


class GhzwError(Exception):
    """Base class for all errors raised by ghzw."""


# diagram construction
class DiagramError(GhzwError):
    pass


class ArityViolation(DiagramError):
    pass


class ZeroArity(DiagramError):
    pass


class PortTaken(DiagramError):
    pass


class DirectionMismatch(DiagramError):
    pass


class BadPort(DiagramError):
    pass


class BoundaryMismatch(DiagramError):
    pass


class InvalidDiagram(DiagramError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "invalid diagram")


# semantics
class SemanticsError(GhzwError):
    pass


class UnknownParam(SemanticsError):
    pass


class NotClosed(SemanticsError):
    pass


class ShapeMismatch(SemanticsError):
    pass


# rules / rewriting
class BadWireIndex(GhzwError):
    pass


class UnsoundRule(GhzwError):
    pass


class InvalidMatch(GhzwError):
    pass


# !-boxes
class PatternError(GhzwError):
    pass


class NoSuchBox(PatternError):
    pass


class MissingCount(PatternError):
    pass


# arithmetic
class ArithError(GhzwError):
    pass


class ZeroDenominator(ArithError):
    pass


class WrongSignature(ArithError):
    pass


class ArityMismatch(ArithError):
    pass


class ParseError(ArithError):
    pass


class DegenerateValue(ArithError):
    pass


# io
class SchemaError(GhzwError):
    pass


class ValidationError(GhzwError):
    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)
