"""Precision bounds for noisy phase estimation with a Kerr (n^2) generator."""
from .errors import DomainError, SingularityError
from .states import (
    MomentSet,
    ProbeState,
    TruncationPolicy,
    coherent_moments,
    coherent_state,
    fock_basis_state,
    gaussian_saturating_moments,
    moments_from_state,
    squeezed_vacuum_state,
)

__version__ = "0.1.0"
