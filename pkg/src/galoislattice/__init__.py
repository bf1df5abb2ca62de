"""Exact Galois-lattice computations: integer normal forms, group cohomology
of finite matrix groups, symmetric squares, del Pezzo and Chatelet Picard
lattices."""

from .errors import GaloisLatticeError
from .groups import GLattice, MatGroup, close_group, h1, h1_cyclic, invariants
from .linalg import FinAbGroup, IntMat, det, kernel_basis, quotient, snf

__version__ = "0.1.0"

__all__ = [
    "FinAbGroup",
    "GLattice",
    "GaloisLatticeError",
    "IntMat",
    "MatGroup",
    "close_group",
    "det",
    "h1",
    "h1_cyclic",
    "invariants",
    "kernel_basis",
    "quotient",
    "snf",
]
