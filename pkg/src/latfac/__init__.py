"""latfac: spectral factorization of positive trigonometric polynomials,
with lattice-strip frequency constraints.

Core objects live in submodules:

- trigpoly: sparse polynomials in one and two variables, certified extrema
- kernels: Dirichlet / Hilbert / analytic frequency masks and L1 norms
- winding: winding number, branch logarithm, analytic projection
- factor1d: one-variable spectral factorization (cepstral + root oracle)
- factor2d: slicewise two-variable factorization and convergence budgets
- lattice: diagonal strips, modular maps, convergents, gap measure
- stripfactor: end-to-end strip-constrained factorization pipelines
- cli: batch front end (entry point `latfac`)
"""

from . import errors
from ._conv import BACKEND as conv_backend
from .trigpoly import TrigPoly1, TrigPoly2

__version__ = "0.1.0"

__all__ = ["errors", "conv_backend", "TrigPoly1", "TrigPoly2", "__version__"]
