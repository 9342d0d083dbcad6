"""Exception types raised by matprof.

Every error derives from :class:`MatrixProfileError`, itself a ``ValueError``,
so callers that only care about "bad input" can catch a single class.
"""


class MatrixProfileError(ValueError):
    pass


class InvalidWindow(MatrixProfileError):
    pass


class InvalidSeries(MatrixProfileError):
    pass


class InvalidPlant(MatrixProfileError):
    pass


class InvalidBudget(MatrixProfileError):
    pass


class InvalidMerge(MatrixProfileError):
    pass


class InvalidPair(MatrixProfileError):
    pass


class InvalidConstraint(MatrixProfileError):
    pass


class InvalidCount(MatrixProfileError):
    pass


class InvalidBits(MatrixProfileError):
    pass


class InvalidAnnotation(MatrixProfileError):
    pass


class InvalidInterval(MatrixProfileError):
    pass


class InvalidShape(MatrixProfileError):
    pass


class InvalidLag(MatrixProfileError):
    pass


class NoPositives(MatrixProfileError):
    pass


class NoCandidates(MatrixProfileError):
    pass


class ParseError(MatrixProfileError):
    """Raised when an input file cannot be decoded.

    ``location`` carries the 1-based line number (CSV) or byte offset (tsbin)
    of the offending token when it is known.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
