"""Numerical verification of para-quaternionic structures and their integrability conditions."""

__version__ = "0.1.0"
