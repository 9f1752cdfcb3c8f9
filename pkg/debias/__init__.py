"""debias-lab - structural bias laboratory for Differential Evolution."""

__version__ = "1.0.0"
__description__ = "f0 protocol, correction strategies and bias analytics for DE"
