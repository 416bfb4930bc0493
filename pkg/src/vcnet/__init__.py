"""Venture-capital syndication networks, firm indicators and a two-factor SEM."""

from .errors import VCNetError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["VCNetError", "BACKEND", "__version__"]
