"""Exception hierarchy shared by all modules."""


class BurrError(Exception):
    """Base class for errors raised by burrecords."""


class ParameterError(BurrError, ValueError):
    """Invalid or missing distribution parameters."""


class DomainError(BurrError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnsupportedMemberError(BurrError, ValueError):
    """The operation is not defined for the requested family member."""


class ConvergenceError(BurrError, ArithmeticError):
    """A numerical solver failed to converge."""


class DivergenceError(BurrError, ArithmeticError):
    """A tail integral does not converge."""


class StatisticError(BurrError, ArithmeticError):
    """A record statistic could not be evaluated (e.g. log of a nonpositive value)."""
