"""Riesz sequences and generalized arithmetic progressions on the 2-torus."""

__version__ = "1.0.0"
__description__ = "Bad-set construction and Riesz certification for exponential systems on T^2"
