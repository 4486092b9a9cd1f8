class EbqError(Exception):
    """Base error for numerical and parameter failures"""


class NonConvergent(EbqError):
    """A truncated series or product failed to converge within policy"""


class DomainError(EbqError):
    """An argument lies outside the domain of a function"""


class PoleError(DomainError):
    """A bracket in a denominator vanishes to working precision"""


class ChargeMismatch(EbqError):
    """Two orderings of an operator product carry different zero-mode content"""


class InvalidIndexPattern(EbqError, ValueError):
    """Index combination not covered by the requested formula"""


class InvalidParameters(EbqError, ValueError):
    """Run parameters violate the algebra or genericity constraints"""


class BranchWarning(UserWarning):
    """Square-root branch choice could not be fixed unambiguously"""
