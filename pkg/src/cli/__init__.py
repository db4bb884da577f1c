"""CLI command modules."""

from . import checks, derive, numeric

__all__ = ["derive", "checks", "numeric"]
