class UsageError(ValueError):
    """Operands disagree on group, field, or coefficient shape, or a
    parameter is out of its documented range."""


class FormatError(UsageError):
    """A serialized envelope or payload cannot be parsed."""
