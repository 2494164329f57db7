"""Entanglement invariants of two-qutrit pure states and a three-path quantum eraser."""

from .audit import ErasureGrid, Scatter, run_audit, run_scatter
from .erasure import ErasureSetup, MarkedState, erase, erasure_sweep, g_t, intensity, predictability
from .invariants import (
    InvariantSet,
    Region,
    boundary_curve,
    invariants_from_spectrum,
    region_membership,
)
from .mat3 import Spectrum, adjugate_eigenvector, eig_hermitian
from .states import SampleSpec, TwoQutritState, haar_sample, named_state, reduced_density

__version__ = "0.1.0"

__all__ = [
    "ErasureGrid", "ErasureSetup", "InvariantSet", "MarkedState", "Region", "SampleSpec",
    "Scatter", "Spectrum", "TwoQutritState", "adjugate_eigenvector", "boundary_curve",
    "eig_hermitian", "erase", "erasure_sweep", "g_t", "haar_sample", "intensity",
    "invariants_from_spectrum", "named_state", "predictability", "reduced_density",
    "region_membership", "run_audit", "run_scatter",
]
