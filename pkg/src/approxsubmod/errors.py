"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ApproxSubmodError`.  The CLI maps :class:`InputError` subclasses to
exit code 2 and :class:`CertificateError` subclasses to exit code 3.
"""


class ApproxSubmodError(Exception):
    """Base class for all package errors."""


class InputError(ApproxSubmodError, ValueError):
    """Invalid user-supplied data or parameters."""


class CertificateError(ApproxSubmodError):
    """A certified invariant failed; signals a bug or a false hypothesis."""


class InvalidTable(InputError):
    pass


class InvalidSubset(InputError):
    pass


class InvalidParams(InputError):
    pass


class InvalidGrouping(InputError):
    pass


class InvalidPoint(InputError):
    pass


class InvalidPerm(InputError):
    pass


class GroundMismatch(InputError):
    pass


class NotModular(InputError):
    pass


class NotNonnegative(InputError):
    pass


class NotSubmodular(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotACover(InputError):
    pass


class NotInGamma(InputError):
    pass


class TooLarge(InputError):
    pass


class Infeasible(InputError):
    pass


class NotApplicable(ApproxSubmodError):
    """A bound's hypotheses are not met for the given instance."""


class NotCertified(ApproxSubmodError):
    """A required approximate-submodularity certificate could not be verified."""


class LpError(ApproxSubmodError):
    """The internal simplex solver failed numerically."""


class SandwichViolation(CertificateError):
    pass


class BoundViolation(CertificateError):
    pass
