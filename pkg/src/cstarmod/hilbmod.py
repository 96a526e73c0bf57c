"""Free Hilbert modules ``A^n`` and their finitely generated submodules.

A vector ``x = (x_0, ..., x_{n-1})`` of ``A^n`` is stored in its block
realization: for block ``i`` of the algebra, the ``n`` coordinate blocks are
stacked into one ``(n * n_i) x n_i`` matrix ``X_i``.  In that picture the
right action of ``a`` is ``X_i @ a_i`` and the inner product is
``<x, y>_i = X_i^* Y_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .calgebra import AlgElem, BlockAlgebra, Seminorm, alg_seminorm
from .errors import AlgebraMismatch, ModuleMismatch


@dataclass(frozen=True)
class FreeModule:
    algebra: BlockAlgebra
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("module rank must be >= 0")

    def zero(self) -> "ModVector":
        return ModVector(self, [np.zeros((self.rank * d, d), complex) for d in self.algebra.dims])

    def basis_vector(self, j: int) -> "ModVector":
        """``e_j``: the unit of ``A`` in coordinate ``j``, zero elsewhere."""
        coords = [self.algebra.zero()] * self.rank
        coords[j] = self.algebra.identity()
        return ModVector.from_coords(self, coords)

    def basis(self) -> list["ModVector"]:
        return [self.basis_vector(j) for j in range(self.rank)]

    def localize(self, p: Seminorm) -> "FreeModule":
        if p.algebra != self.algebra:
            raise AlgebraMismatch("seminorm over a different algebra")
        return FreeModule(p.quotient, self.rank)


class ModVector:
    __slots__ = ("module", "blocks")

    def __init__(self, module: FreeModule, blocks):
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in blocks)
        dims = module.algebra.dims
        if len(blocks) != len(dims):
            raise ModuleMismatch(f"expected {len(dims)} blocks, got {len(blocks)}")
        for i, (b, d) in enumerate(zip(blocks, dims)):
            if b.shape != (module.rank * d, d):
                raise ModuleMismatch(f"block {i} has shape {b.shape}, expected {(module.rank * d, d)}")
        self.module = module
        self.blocks = blocks

    @classmethod
    def from_coords(cls, module: FreeModule, coords: Sequence[AlgElem]) -> "ModVector":
        if len(coords) != module.rank:
            raise ModuleMismatch(f"expected {module.rank} coordinates, got {len(coords)}")
        for c in coords:
            if c.algebra != module.algebra:
                raise AlgebraMismatch("coordinate over a different algebra")
        blocks = []
        for i, d in enumerate(module.algebra.dims):
            if coords:
                blocks.append(np.vstack([c.blocks[i] for c in coords]))
            else:
                blocks.append(np.zeros((0, d), complex))
        return cls(module, blocks)

    @property
    def coords(self) -> list[AlgElem]:
        alg = self.module.algebra
        return [
            AlgElem(alg, [b[j * d:(j + 1) * d] for b, d in zip(self.blocks, alg.dims)])
            for j in range(self.module.rank)
        ]

    def _check(self, other: "ModVector"):
        if not isinstance(other, ModVector) or other.module != self.module:
            raise ModuleMismatch("vectors live in different modules")

    def __add__(self, other):
        self._check(other)
        return ModVector(self.module, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return ModVector(self.module, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ModVector(self.module, [-a for a in self.blocks])

    def __mul__(self, a):
        """Right action by an algebra element, or scaling by a complex number."""
        if isinstance(a, AlgElem):
            if a.algebra != self.module.algebra:
                raise AlgebraMismatch("right action by an element of another algebra")
            return ModVector(self.module, [x @ b for x, b in zip(self.blocks, a.blocks)])
        return ModVector(self.module, [x * a for x in self.blocks])

    def __eq__(self, other):
        if not isinstance(other, ModVector) or other.module != self.module:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"ModVector(dims={self.module.algebra.dims}, rank={self.module.rank})"


@dataclass
class Submodule:
    """The closed submodule generated by finitely many vectors of ``module``."""

    module: FreeModule
    generators: list[ModVector]

    def __post_init__(self):
        self.generators = list(self.generators)
        for g in self.generators:
            if g.module != self.module:
                raise ModuleMismatch("generator outside the ambient module")

    def generator_matrix(self, i: int) -> np.ndarray:
        """Block ``i`` of all generators side by side: ``(n n_i) x (g n_i)``."""
        d = self.module.algebra.dims[i]
        if not self.generators:
            return np.zeros((self.module.rank * d, 0), complex)
        return np.hstack([g.blocks[i] for g in self.generators])


def _conj_gram(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # X^* Y summed row by row in a fixed order, so <x,y>^* == <y,x> bit for bit
    if x.shape[0] == 0:
        return np.zeros((x.shape[1], y.shape[1]), complex)
    # real arithmetic only: a complex multiply may fuse ad - bc and lose the antisymmetry
    xr, xi = x.real[:, :, None], x.imag[:, :, None]
    yr, yi = y.real[:, None, :], y.imag[:, None, :]
    re = xr * yr + xi * yi
    im = xr * yi - xi * yr
    acc_re, acc_im = re[0].copy(), im[0].copy()
    for r in range(1, x.shape[0]):
        acc_re += re[r]
        acc_im += im[r]
    return acc_re + 1j * acc_im


def inner(x: ModVector, y: ModVector) -> AlgElem:
    """A-valued inner product ``<x, y> = sum_j x_j^* y_j``."""
    x._check(y)
    return AlgElem(x.module.algebra, [_conj_gram(a, b) for a, b in zip(x.blocks, y.blocks)])


def vec_seminorm(p: Seminorm, x: ModVector) -> float:
    """``sqrt(p(<x, x>))``."""
    if p.algebra != x.module.algebra:
        raise AlgebraMismatch("seminorm over a different algebra")
    return float(np.sqrt(max(alg_seminorm(p, inner(x, x)), 0.0)))


def direct_sum(e: FreeModule, f: FreeModule) -> FreeModule:
    if e.algebra != f.algebra:
        raise AlgebraMismatch("direct sum of modules over different algebras")
    return FreeModule(e.algebra, e.rank + f.rank)


def pair(x: ModVector, y: ModVector) -> ModVector:
    """``(x, y)`` in ``E ⊕ F``."""
    s = direct_sum(x.module, y.module)
    return ModVector(s, [np.vstack([a, b]) for a, b in zip(x.blocks, y.blocks)])


def split(z: ModVector, n: int) -> tuple[ModVector, ModVector]:
    """Inverse of :func:`pair` given the rank ``n`` of the first summand."""
    alg = z.module.algebra
    e = FreeModule(alg, n)
    f = FreeModule(alg, z.module.rank - n)
    xs = [b[: n * d] for b, d in zip(z.blocks, alg.dims)]
    ys = [b[n * d:] for b, d in zip(z.blocks, alg.dims)]
    return ModVector(e, xs), ModVector(f, ys)


def submodule_projector(f: Submodule, atol: float = 0.0):
    """Orthogonal projection of the ambient module onto ``f``.

    Per block this is left multiplication by ``W W^+`` with ``W`` the
    generator blocks side by side, i.e. the projector onto their column span.
    Generator directions with singular value at most ``atol`` are ignored.
    """
    from .opmap import ModuleMap

    blocks = []
    for i in range(f.module.algebra.k):
        w = f.generator_matrix(i)
        blocks.append(w @ linalg.mat_pinv(w, linalg.RANK_RTOL, atol))
    return ModuleMap(f.module, f.module, blocks)


def orth_complement(f: Submodule):
    """Projection onto ``F^⊥ = {x : <g, x> = 0 for every generator g}``."""
    from .opmap import ModuleMap

    return ModuleMap.identity(f.module) - submodule_projector(f)


def complement_submodule(f: Submodule) -> Submodule:
    """Generators of ``F^⊥``: the columns of ``I - P_F`` applied to the basis."""
    q = orth_complement(f)
    # round each block to an exact projector so that rounding noise left over
    # from a full-rank F does not turn into spurious generator directions
    blocks = []
    for b in q.blocks:
        w, u = linalg.hermitian_eig(b, tol=np.inf)
        keep = u[:, w > 0.5]
        blocks.append(keep @ keep.conj().T)
    q = type(q)(q.domain, q.codomain, blocks)
    return Submodule(f.module, [q.apply(e) for e in f.module.basis()])


def biorth_residual(f: Submodule) -> float:
    """Distance between the projectors onto ``F^⊥⊥`` and onto ``F``.

    ``F^⊥`` is re-generated from vectors and projected onto from scratch, so
    the two projectors come out of independent pseudoinverse computations.
    """
    from .opmap import ModuleMap

    perp = complement_submodule(f)
    # generators of F^⊥ are images of unit vectors: noise below RANK_RTOL is no direction
    bi = ModuleMap.identity(f.module) - submodule_projector(perp, atol=linalg.RANK_RTOL)
    return (bi - submodule_projector(f)).norm()


def biorth_check(f: Submodule, tol: float = 1e-9) -> bool:
    """Whether ``F`` coincides with its biorthogonal complement."""
    return biorth_residual(f) <= tol


def vec_localize(p: Seminorm, x: ModVector) -> ModVector:
    """``σ_p(x)``: keep the support blocks."""
    return ModVector(x.module.localize(p), [x.blocks[i] for i in p.support])


def vec_connect(p: Seminorm, q: Seminorm, x_p: ModVector) -> ModVector:
    """``σ_pq: E_p -> E_q`` for ``q <= p``."""
    pos = q.positions_in(p)
    if x_p.module.algebra != p.quotient:
        raise AlgebraMismatch("vector does not live over the quotient of p")
    return ModVector(FreeModule(q.quotient, x_p.module.rank), [x_p.blocks[j] for j in pos])


def submodule_localize(p: Seminorm, f: Submodule) -> Submodule:
    return Submodule(f.module.localize(p), [vec_localize(p, g) for g in f.generators])
