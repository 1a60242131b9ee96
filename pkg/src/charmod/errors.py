"""Exception hierarchy.  The CLI reports ``type(err).__name__`` on exit code 2."""


class CharmodError(Exception):
    """Base class for every domain error raised by this package."""


class ParseError(CharmodError):
    pass


# geometry
class NonFaceIntersection(CharmodError):
    pass


class EmptyCell(CharmodError):
    pass


class DimensionMismatch(CharmodError):
    pass


class NotInComplex(CharmodError):
    pass


class ZeroDimensionalCell(CharmodError):
    pass


class NotAVertex(CharmodError):
    pass


class NotFreePair(CharmodError):
    pass


class Unbounded(CharmodError):
    pass


class LowerDimensional(CharmodError):
    pass


class NotClosed(CharmodError):
    """A facet of some cell is missing where a closed complex is required."""


# weyl
class SingularMatrix(CharmodError):
    pass


class OrderMismatch(CharmodError):
    pass


class Underdetermined(CharmodError):
    pass


class Inconsistent(CharmodError):
    pass


# presentations
class HullConditionViolated(CharmodError):
    pass


class ConstructionFailed(CharmodError):
    pass


class NotASubcomplex(CharmodError):
    pass


# annihilators
class NotSimple(CharmodError):
    pass


class NoVertices(CharmodError):
    pass


# direct images / splines
class BadProjection(CharmodError):
    pass


class UnboundedFiber(CharmodError):
    pass


class NonGenericSample(CharmodError):
    pass
