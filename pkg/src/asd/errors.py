"""Exception hierarchy.

The CLI maps these onto exit codes: ``UsageError`` -> 1,
``PreconditionError`` -> 2.  ``NonLinearWitness`` is a result, not an
exception, and is mapped to exit code 3 by the CLI.
"""


class AsdError(Exception):
    """Base class for every error raised by the package."""


class UsageError(AsdError):
    """Malformed input: bad JSON, schema violation, unparsable expression."""


class ParseError(UsageError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class PreconditionError(AsdError):
    """A mathematical precondition of an operation does not hold."""


class NotExpandable(PreconditionError):
    pass


class UnknownVariable(PreconditionError):
    pass


class NotSquare(PreconditionError):
    pass


class BadParameters(PreconditionError):
    pass


class CyclicVectorFailure(PreconditionError):
    pass


class PoleTooHigh(PreconditionError):
    pass


class NonIntegerRank(PreconditionError):
    pass


class ZeroRank(PreconditionError):
    """The generic Katz rank is 0; the specialization theorem needs rho >= 1."""


class RankTooSmall(PreconditionError):
    pass


class NotCommuting(PreconditionError):
    pass


class PropertyLViolated(PreconditionError):
    pass


class CommutationFailure(AsdError):
    """Restricted relation matrices fail to commute.

    Raising this on a presentation that satisfies property L would
    contradict the linearity statement; it is deliberately not a
    ``PreconditionError``.
    """


class WindowExhausted(PreconditionError):
    pass


class Unsupported(PreconditionError):
    pass


class NotLocalized(PreconditionError):
    pass


class NotStable(PreconditionError):
    pass


class NoBoundFound(PreconditionError):
    pass


class LatticeNotStable(PreconditionError):
    pass


class IrrationalEigenvalue(PreconditionError):
    def __init__(self, message, tag=None):
        self.tag = tag
        super().__init__(message)


class StabilityFailure(PreconditionError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)
