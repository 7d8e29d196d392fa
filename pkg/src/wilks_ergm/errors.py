"""Exception hierarchy shared by the fitting, testing and simulation layers."""


class WilksError(Exception):
    """Base class for every error raised by this package."""


class ParseError(WilksError, ValueError):
    pass


class MalformedRow(ParseError):
    pass


class DuplicatePair(ParseError):
    pass


class VertexOutOfRange(ParseError):
    pass


class SelfLoop(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class DimensionMismatch(WilksError, ValueError):
    pass


class InvalidTiedSet(WilksError, ValueError):
    pass


class FitError(WilksError):
    """A maximum likelihood fit could not produce an estimate."""


class NoMleExists(FitError):
    """The data lie on the boundary: the likelihood has no maximiser.

    ``witness`` is an optional ``(A, B)`` pair of 0-based vertex tuples such
    that no vertex in ``B`` ever beats a vertex in ``A``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotConverged(FitError):
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class Diverged(NotConverged):
    """Some parameter left the bounded region during iteration."""


class NonpositiveVariance(WilksError, ValueError):
    pass


class SingularCovariance(WilksError, ValueError):
    pass


class EmptySample(WilksError, ValueError):
    pass


class TooManyFailures(WilksError):
    def __init__(self, message, failures=0, replicates=0):
        super().__init__(message)
        self.failures = failures
        self.replicates = replicates
