"""Grigorchuk-Lab: computations in the Grigorchuk groups G_omega."""

__version__ = "0.1.0"
