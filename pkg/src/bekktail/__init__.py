"""Tail behavior of Gaussian BEKK-ARCH processes through their stochastic recurrence equation."""
__version__ = "0.1.0"
