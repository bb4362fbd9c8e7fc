"""Nominal automata with name allocation and graded equational logic."""

__version__ = "0.1.0"
