"""Relative homological algebra and Taylor towers over finite pointed-set windows."""

__version__ = "0.1.0"
