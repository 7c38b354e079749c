"""Simulation and verification toolkit for proportional preferential-attachment graphs."""

__version__ = "0.1.0"
