"""Harmonic 1-forms on hyperbolic Margulis tubes.

Submodules: ``hypergeom`` (conjugate-parameter 2F1), ``tubegeom`` (tube
metric and volumes), ``radial`` and ``harmonics`` (mode expansions, norms,
fluxes), ``bounds`` (closed-form inequalities), ``counterexample`` (explicit
norm-growth constructions), ``verify`` and ``cli``.
"""

from .errors import ConvergenceError, DomainError, ResolutionError
from .harmonics import HarmonicField, Mode, QuadratureSpec
from .hypergeom import ConjugateParams, SeriesResult, f21_conj, f21_deriv_factor
from .tubegeom import TubeParams

__version__ = "0.1.0"

__all__ = [
    "ConjugateParams",
    "ConvergenceError",
    "DomainError",
    "HarmonicField",
    "Mode",
    "QuadratureSpec",
    "ResolutionError",
    "SeriesResult",
    "TubeParams",
    "f21_conj",
    "f21_deriv_factor",
]
