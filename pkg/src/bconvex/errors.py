"""Exception hierarchy shared by every module."""


class BConvexError(Exception):
    """Base class for domain errors (CLI exit code 2)."""


class DimensionMismatch(BConvexError, ValueError):
    pass


class GuardExceeded(BConvexError):
    """An enumeration would exceed its desk-scale size guard."""


class SingularInLimit(BConvexError):
    """The limit determinant of a system vanishes."""


class SingularAtOrder(BConvexError):
    """The order-p determinant of a system vanishes."""


class DegenerateHyperplane(BConvexError):
    """All limit coefficients of a hyperplane vanish."""


class InvalidCoefficients(BConvexError, ValueError):
    pass


class NotDisjoint(BConvexError):
    pass


class NoConvergence(BConvexError):
    pass


class CertificateFailure(BConvexError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point
