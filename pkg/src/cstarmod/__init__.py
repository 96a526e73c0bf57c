"""Hilbert modules over finite direct sums of matrix algebras.

Adjoints, generalized inverses, polar decompositions, graph projections and
localization along the seminorm lattice, plus randomized verification suites.
"""
from ._kernels import BACKEND
from .calgebra import AlgElem, BlockAlgebra, Seminorm
from .hilbmod import FreeModule, ModVector, Submodule
from .invsys import LocalizedOp
from .opmap import ModuleMap, RawLinearMap

__all__ = [
    "BACKEND",
    "AlgElem",
    "BlockAlgebra",
    "Seminorm",
    "FreeModule",
    "ModVector",
    "Submodule",
    "ModuleMap",
    "RawLinearMap",
    "LocalizedOp",
]

__version__ = "0.1.0"
