"""Exact specialization of meromorphic connections along a hyperplane."""

__version__ = "0.1.0"
