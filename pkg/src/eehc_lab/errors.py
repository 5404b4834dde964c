"""Exception types shared across the package."""


class EEHCError(Exception):
    """Base class for all errors raised by eehc_lab."""


class ValidationError(EEHCError, ValueError):
    """A parameter violated one of its documented rules.

    ``field`` names the offending parameter (dotted path when it comes from a
    config document) and ``rule`` is the rule that failed, e.g. ``"d_bs >= 0"``.
    """

    def __init__(self, field: str, rule: str, value=None):
        self.field = field
        self.rule = rule
        self.value = value
        msg = f"{field}: must satisfy {rule}"
        if value is not None:
            msg += f" (got {value!r})"
        super().__init__(msg)


class ElectionFailure(EEHCError):
    """Too few live nodes remain to form k clusters of m head-set members."""
