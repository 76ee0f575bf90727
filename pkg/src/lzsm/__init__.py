"""Driven two-level systems: exact sweep solutions, interference, and analogs."""

__version__ = "0.1.0"
