"""Parity-deformed Glauber-Fock lattices, generalized cat states and Wigner functions."""

from .fock import TruncationError, TruncationGuard
from .lattice import EvolutionRecord, LatticeSpec, LeakageWarning
from .specialfn import DomainError

__all__ = [
    "DomainError",
    "EvolutionRecord",
    "LatticeSpec",
    "LeakageWarning",
    "TruncationError",
    "TruncationGuard",
]

__version__ = "0.1.0"
