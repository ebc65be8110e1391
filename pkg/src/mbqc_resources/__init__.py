"""Graph-state resources for measurement-based quantum computing.

Submodules: ``gf2`` (bit matrices), ``graph`` (graphs and lattices),
``calculus`` (Pauli measurement rewrites), ``width`` (cut-rank and exact
width), ``oracle`` (dense state vectors), ``reduction`` (lattice-to-grid
certificates), ``localizable`` (Pauli-localizable entanglement),
``percolation`` (defect percolation) and ``cli``.
"""

from .errors import InputError, ResourceError
from .graph import Graph, LatticeSpec, is_isomorphic, lattice, make_graph

__version__ = "0.1.0"

__all__ = ["Graph", "LatticeSpec", "InputError", "ResourceError", "is_isomorphic", "lattice", "make_graph"]
