"""Exact time evolution of a dressed oscillator in a reflecting spherical cavity."""

__version__ = "0.1.0"
