"""Class integration test ordering with control-coupling-aware stubbing cost."""

__version__ = "0.1.0"
