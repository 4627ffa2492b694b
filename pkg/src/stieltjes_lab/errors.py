"""Exception hierarchy shared by every module."""


class StieltjesLabError(Exception):
    """Base class for all library errors."""


class InvalidInput(StieltjesLabError, ValueError):
    pass


class NonConvergence(StieltjesLabError, ArithmeticError):
    """Adaptive quadrature ran out of depth or panels before meeting tolerance."""


class GridMismatch(StieltjesLabError, ValueError):
    pass


class UnknownEntry(StieltjesLabError, KeyError):
    pass


class RouteUnavailable(StieltjesLabError, ValueError):
    pass


class IllConditioned(StieltjesLabError, ArithmeticError):
    pass


class GammaOverflow(StieltjesLabError, OverflowError):
    pass
