"""Grover search analysis toolkit."""
__version__ = "1.0.0"
