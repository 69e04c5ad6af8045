"""Simulation and recovery of micron-scale motion with a CW quadrature Doppler radar."""

__version__ = "0.1.0"
