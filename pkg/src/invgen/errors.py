"""Exceptions shared across the package."""


class CapExceeded(RuntimeError):
    """The group is too large for an operation that needs its element table."""


class BudgetExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured budget."""


class NotNormal(ValueError):
    """A subgroup mask passed as a normal subgroup is not normal."""


class NotSubgroup(ValueError):
    """A mask is not closed under composition."""


class NotSimple(ValueError):
    """A group required to be nonabelian simple is not."""


class DescriptorError(ValueError):
    """Malformed or unsupported group descriptor."""

    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos
