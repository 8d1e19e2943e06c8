"""Radial-weight calculus and Volterra-operator criteria into H^infinity."""

__version__ = "0.1.0"
