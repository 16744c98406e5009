"""Checker and renderer for XML proof certificates about term rewrite systems."""

__version__ = "0.1.0"
