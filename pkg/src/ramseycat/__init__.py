"""Finite categories, parameter words and ordered structures for structural Ramsey checks."""

__version__ = "0.1.0"
