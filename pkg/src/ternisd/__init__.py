"""Ternary syndrome decoding in the large-weight regime: solvers and cost estimates."""

__version__ = "0.1.0"
