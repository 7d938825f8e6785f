"""Exception types raised across the package.

Everything derives from :class:`MagicSquareError` (a ``ValueError``), so
callers that only care about "bad input" can catch one class.
"""


class MagicSquareError(ValueError):
    pass


# linalg
class NotHermitian(MagicSquareError):
    pass


class NonSquare(MagicSquareError):
    pass


class ShapeMismatch(MagicSquareError):
    pass


class DependentInput(MagicSquareError):
    pass


class NotRankOne(MagicSquareError):
    pass


# squares
class MalformedGrid(MagicSquareError):
    pass


class InvalidQLS(MagicSquareError):
    pass


class InvalidLatinSquare(MagicSquareError):
    pass


class InvalidPermutation(MagicSquareError):
    pass


class InteriorSizeMismatch(MagicSquareError):
    pass


class ExteriorSizeMismatch(MagicSquareError):
    pass


# construct
class NotOrthonormal(MagicSquareError):
    pass


class SizeMismatch(MagicSquareError):
    pass


class NotPOVM(MagicSquareError):
    pass


class BasesCommute(MagicSquareError):
    pass


class BadSize(MagicSquareError):
    pass


# decompose
class NotDoublyStochastic(MagicSquareError):
    pass


class MatchingFailed(MagicSquareError):
    pass


class PreconditionFailed(MagicSquareError):
    pass


class TooLarge(MagicSquareError):
    pass


class NonQMSInput(MagicSquareError):
    pass


# mconv
class IsometrySumViolation(MagicSquareError):
    pass


class NotIsometry(MagicSquareError):
    pass
