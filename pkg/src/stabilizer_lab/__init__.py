"""Stabilizability of quantum states under fixed dissipation.

Decides whether a Hamiltonian can hold a given density operator (or Gaussian
covariance matrix) stationary against a prescribed Lindblad dissipator, and
constructs that Hamiltonian when it exists.
"""

from .density import Verdict, full_report, spectral_conditions, synthesize_hamiltonian
from .gaussian import full_report_cv, spectral_conditions_cv, synthesize_G
from .operators import DensityOperator, GKLSModel, LindbladSet

__version__ = "0.1.0"

__all__ = [
    "DensityOperator",
    "GKLSModel",
    "LindbladSet",
    "Verdict",
    "full_report",
    "full_report_cv",
    "spectral_conditions",
    "spectral_conditions_cv",
    "synthesize_G",
    "synthesize_hamiltonian",
]
