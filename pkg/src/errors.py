"""Exception hierarchy shared by every module."""

from typing import Optional


class ThetaPRError(Exception):
    """Base class for toolkit errors."""


class InvalidInput(ThetaPRError, ValueError):
    """Input violates a documented precondition."""


class DegenerateInput(InvalidInput):
    """Input is well-formed but degenerate (repeated points, singular maps)."""


class InfeasibleInput(InvalidInput):
    """No object with the requested property exists for this input."""


class ResourceLimit(ThetaPRError):
    """An enumeration guard or budget was exceeded."""

    def __init__(self, message: str, checked: int = 0, total: Optional[int] = None):
        super().__init__(message)
        self.checked = checked
        self.total = total
