"""Exception hierarchy. Every domain error derives from :class:`SfregError`."""


class SfregError(Exception):
    """Base class for domain errors raised by the library."""


class ParseError(SfregError):
    """Syntax error in an expression, carrying the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariable(SfregError):
    def __init__(self, name, allowed):
        super().__init__(f"unknown variable {name!r}; declared: {sorted(allowed)}")
        self.name = name


class NotPolynomial(SfregError):
    pass


class EvaluationSingular(SfregError):
    pass


class IdenticallyZero(SfregError):
    pass


class SingularConstraintMatrix(SfregError):
    pass


class InvalidConstraints(SfregError):
    pass


class OutsideDomain(SfregError):
    pass


class FamilyEndpointMismatch(SfregError):
    pass


class NotOnCriticalSet(SfregError):
    pass


class NoFastEquilibrium(SfregError):
    pass


class NonMonotonicPhi(SfregError):
    pass


class InsufficientSamples(SfregError):
    pass


class UnresolvableWidth(SfregError):
    pass


class NoFoldPassage(SfregError):
    pass


class UnknownId(SfregError):
    pass
