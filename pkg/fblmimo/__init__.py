"""
The fblmimo module
"""
__version__ = "0.1.0"

__all__ = ["specfun", "randmat", "dispersion", "rate", "mc", "sweep"]
