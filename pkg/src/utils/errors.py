"""Exception hierarchy for scheme analysis."""
from typing import List, Optional


class LBMFDError(ValueError):
    """Base error for every failure raised by the package."""


class MalformedCoefficientError(LBMFDError):
    pass


class PoleError(LBMFDError):
    """A coefficient limit does not exist (genuine pole at the parameter)."""


class HistoryError(LBMFDError):
    pass


class BindingError(LBMFDError):
    pass


class InversionError(LBMFDError):
    pass


class InternalConsistencyError(LBMFDError):
    pass


class EliminationError(LBMFDError):
    pass


class SingularRelaxationError(LBMFDError):
    pass


class PreconditionError(LBMFDError):
    pass


class SchemeValidationError(LBMFDError):
    """Raised when a scheme fails validation; keeps every issue found."""

    def __init__(self, issues: List[str]):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues) or "invalid scheme")


class SchemeFileError(LBMFDError):
    """Error located in a scheme file."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.column = column
        self.key = key
        where = []
        if key:
            where.append(key)
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(f"{prefix}{message}")


class ExpressionSyntaxError(SchemeFileError):
    pass


class ShapeError(SchemeFileError):
    pass
