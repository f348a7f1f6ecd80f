"""Exception hierarchy shared by all modules."""


class LevelSetError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(LevelSetError, ValueError):
    """Malformed or inconsistent user input (CLI exit status 2)."""


class NonPrimitive(InvalidInput):
    pass


class EmptyAlphabet(InvalidInput):
    pass


class BadBetaExpansion(InvalidInput):
    pass


class WordTooLong(InvalidInput):
    pass


class WordTooShort(InvalidInput):
    pass


class DepthMismatch(InvalidInput):
    pass


class BadCheckpoints(InvalidInput):
    pass


class BadWeights(InvalidInput):
    pass


class DegenerateWindow(InvalidInput):
    pass


class ExhaustiveTooLarge(InvalidInput):
    pass


class HorizonTooShort(InvalidInput):
    pass


class Infeasible(LevelSetError):
    """The constraint set {mu : int phi_i dmu = a_i} is empty."""


class NumericalError(LevelSetError):
    """Numerical non-convergence (CLI exit status 3)."""


class NoConvergence(NumericalError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class BisectionBracketFailure(NumericalError):
    pass
