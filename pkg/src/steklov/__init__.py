"""Steklov and Dirichlet-to-Neumann spectra of smooth planar domains."""

__version__ = "0.1.0"

from .errors import NumericalError, PoleError
from .geometry import Curve, arclength_reparameterize, make_curve
from .spectrum import Spectrum
from .bem import dtn_operator, steklov_spectrum

__all__ = [
    "__version__",
    "Curve",
    "NumericalError",
    "PoleError",
    "Spectrum",
    "arclength_reparameterize",
    "dtn_operator",
    "make_curve",
    "steklov_spectrum",
]
