"""Bundled sample programs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..frontend import lower, parse_files
from ..model import ProgramModel

ABC_FILES = ("A.minij", "B.minij", "C.minij")


def abc_paths() -> list[Path]:
    root = resources.files(__package__) / "abc"
    return [Path(str(root / name)) for name in ABC_FILES]


def abc_model() -> ProgramModel:
    """The three-class motivating sample (classes A, B, C), one file per class."""
    return lower(parse_files(abc_paths()), name="abc")
