"""Gaussian valence bond states on harmonic rings.

Covariance matrices use interleaved quadratures ``(q1, p1, q2, p2, ...)`` and
the vacuum has covariance matrix equal to the identity.
"""

from importlib.metadata import PackageNotFoundError, version

from ._kernels import BACKEND
from .building_block import (
    OpticalParams,
    StandardFormParams,
    local_invariants,
    optical_cm,
    optical_from_standard,
    s_min,
    standard_form_cm,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .entanglement import (
    PartitionedState,
    eof_symmetric,
    is_separable,
    log_negativity,
    min_pt_symplectic_eigenvalue,
    s2_polynomial_root,
    threshold_curve,
    threshold_s_k,
)
from .errors import GvbsError, NumericalError, ValidationError
from .phase_space import CovarianceMatrix, SymplecticTransform, symplectic_spectrum
from .protocols import optimal_fidelity, optimize_fidelity_numeric, teleport_fidelity, telecloning_grid
from .valence_bond import EprLimit, FiniteBond, GvbsSpec, GvbsState, build_gvbs, distance_reduction, swap_oracle

try:
    __version__ = version("gvbs")
except PackageNotFoundError:  # running from a source tree without metadata
    __version__ = "0.0.0"

__all__ = [
    "BACKEND",
    "DEFAULT_TOLERANCES",
    "CovarianceMatrix",
    "EprLimit",
    "FiniteBond",
    "GvbsError",
    "GvbsSpec",
    "GvbsState",
    "NumericalError",
    "OpticalParams",
    "PartitionedState",
    "StandardFormParams",
    "SymplecticTransform",
    "Tolerances",
    "ValidationError",
    "build_gvbs",
    "distance_reduction",
    "eof_symmetric",
    "is_separable",
    "local_invariants",
    "log_negativity",
    "min_pt_symplectic_eigenvalue",
    "optical_cm",
    "optical_from_standard",
    "optimal_fidelity",
    "optimize_fidelity_numeric",
    "s2_polynomial_root",
    "s_min",
    "standard_form_cm",
    "swap_oracle",
    "symplectic_spectrum",
    "teleport_fidelity",
    "telecloning_grid",
    "threshold_curve",
    "threshold_s_k",
]
