"""minij frontend: source text to program model, and trees back to text."""

from .lower import LoweringError, NameResolutionError, lower
from .parser import MinijSyntaxError, SourceUnit, parse, parse_files
from .printer import pretty

__all__ = [
    "LoweringError",
    "MinijSyntaxError",
    "NameResolutionError",
    "SourceUnit",
    "lower",
    "parse",
    "parse_files",
    "pretty",
]
