"""Discretizations of the 1D singularly perturbed problem -eps u'' + u' = f."""

from .methods import Method
from .mesh_fem import P1Function, P2Function, UniformMesh

__all__ = ["Method", "P1Function", "P2Function", "UniformMesh"]
__version__ = "0.1.0"
