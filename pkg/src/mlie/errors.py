"""Exception types shared across the package."""

from __future__ import annotations


class MLAError(Exception):
    """Base class for every error raised by mlie."""


class ValidationError(MLAError):
    """A raw table is not a group table."""


class NotClosed(ValidationError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"table entry at {witness} is out of range")


class NotAssociative(ValidationError):
    def __init__(self, a, b, c):
        self.witness = (a, b, c)
        super().__init__(f"(ab)c != a(bc) for (a, b, c) = {self.witness}")


class NoIdentity(ValidationError):
    def __init__(self):
        self.witness = None
        super().__init__("no two-sided identity element")


class MissingInverse(ValidationError):
    def __init__(self, a):
        self.witness = a
        super().__init__(f"element {a} has no two-sided inverse")


class InvalidParameters(MLAError):
    pass


class NotNormal(MLAError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"subset is not a normal subgroup; witness {witness}")


class NotAnIdeal(MLAError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"subset is not an ideal; witness {witness}")


class NotWellDefined(MLAError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"operation is not well defined on cosets; witness {witness}")


class PreconditionFailed(MLAError):
    def __init__(self, condition, witness):
        self.condition = condition
        self.witness = witness
        super().__init__(f"precondition {condition} fails at {witness}")


class TheoremViolated(MLAError):
    """A construction that should certify did not.

    Carries the violation reports unchanged so the witness can be replayed.
    """

    def __init__(self, violations, context=""):
        self.violations = list(violations)
        first = self.violations[0] if self.violations else None
        super().__init__(f"certification failed {context}: {first}")


class BudgetExceeded(MLAError):
    def __init__(self, message="time budget exceeded", partial=None):
        self.partial = partial
        super().__init__(message)


class ConstructionInvalid(MLAError):
    pass


class QuotientMismatch(MLAError):
    pass


class NotCentralType(MLAError):
    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(f"{reason} (witness {witness})")


class ConditionFailed(MLAError):
    def __init__(self, label, witness):
        self.label = label
        self.witness = witness
        super().__init__(f"condition ({label}) fails at {witness}")
