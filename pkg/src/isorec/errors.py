"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command
line front end reports in its JSON error object.
"""


class IsorecError(Exception):
    code = "error"


class InvalidCoefficients(IsorecError, ValueError):
    code = "invalid-coefficients"


class DomainError(IsorecError, ValueError):
    code = "domain-error"


class OutOfRange(IsorecError, ValueError):
    """A distance or segment length reached the monotonicity threshold."""

    code = "out-of-range"


class OracleFailure(IsorecError, RuntimeError):
    code = "oracle-failure"


class PreconditionError(IsorecError, ValueError):
    code = "precondition"


class BudgetError(IsorecError, RuntimeError):
    code = "budget"


class UnsupportedDimension(IsorecError, ValueError):
    code = "unsupported-dimension"


class UnsupportedOperator(IsorecError, ValueError):
    code = "unsupported-operator"


class NTooSmall(IsorecError, ValueError):
    code = "n-too-small"


class ParameterError(IsorecError, ValueError):
    code = "parameter"


class InvalidBody(IsorecError, ValueError):
    code = "invalid-body"
