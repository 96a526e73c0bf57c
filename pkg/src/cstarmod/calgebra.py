"""Finite direct sums of full matrix algebras and their seminorm lattice.

An algebra ``A = M_{n_0} + ... + M_{n_{k-1}}`` is described by its block sizes.
A seminorm is a subset of block indices; its quotient ``A_p`` keeps exactly the
blocks in the subset, so localization and the connecting maps between
quotients are plain block restriction.  The empty subset gives the zero
algebra with no blocks at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import AlgebraMismatch, NotComparable


@dataclass(frozen=True)
class BlockAlgebra:
    """``⊕ M_{n_i}`` for ``dims = (n_0, ..., n_{k-1})``.

    ``dims = ()`` is the zero algebra; it only arises as a quotient by the
    empty seminorm.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise ValueError(f"block sizes must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def k(self) -> int:
        return len(self.dims)

    def zero(self) -> "AlgElem":
        return AlgElem(self, [np.zeros((d, d), complex) for d in self.dims])

    def identity(self) -> "AlgElem":
        return AlgElem(self, [np.eye(d, dtype=complex) for d in self.dims])

    def scalar(self, c: complex) -> "AlgElem":
        return AlgElem(self, [c * np.eye(d, dtype=complex) for d in self.dims])

    def seminorm(self, support: Iterable[int]) -> "Seminorm":
        return Seminorm(self, support)

    def full(self) -> "Seminorm":
        return Seminorm(self, range(self.k))

    def all_seminorms(self) -> list["Seminorm"]:
        """Every subset of block indices, ordered by size then lexicographically."""
        out = []
        for mask in sorted(range(1 << self.k), key=lambda m: (bin(m).count("1"), m)):
            out.append(Seminorm(self, [i for i in range(self.k) if mask >> i & 1]))
        return out

    def restrict(self, support: Sequence[int]) -> "BlockAlgebra":
        return BlockAlgebra(tuple(self.dims[i] for i in support))


class AlgElem:
    """An element of a :class:`BlockAlgebra`: one square matrix per block."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks):
        blocks = tuple(linalg.as_cmatrix(b) for b in blocks)
        if len(blocks) != algebra.k:
            raise AlgebraMismatch(f"expected {algebra.k} blocks, got {len(blocks)}")
        for i, (b, d) in enumerate(zip(blocks, algebra.dims)):
            if b.shape != (d, d):
                raise AlgebraMismatch(f"block {i} has shape {b.shape}, expected {(d, d)}")
        self.algebra = algebra
        self.blocks = blocks

    def _check(self, other: "AlgElem"):
        if not isinstance(other, AlgElem) or other.algebra != self.algebra:
            raise AlgebraMismatch("elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgElem(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgElem(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgElem(self.algebra, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            self._check(other)
            return AlgElem(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgElem(self.algebra, [a * other for a in self.blocks])

    def __rmul__(self, c):
        return AlgElem(self.algebra, [c * a for a in self.blocks])

    def star(self) -> "AlgElem":
        return AlgElem(self.algebra, [a.conj().T for a in self.blocks])

    def __eq__(self, other):
        if not isinstance(other, AlgElem) or other.algebra != self.algebra:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks), default=0.0)

    def __repr__(self):
        return f"AlgElem(dims={self.algebra.dims})"


class Seminorm:
    """A C*-seminorm ``p_S(a) = max_{i in S} ||a_i||`` named by its support ``S``.

    Seminorms are ordered by inclusion of supports: ``p >= q`` iff
    ``support(p) ⊇ support(q)``.
    """

    __slots__ = ("algebra", "support")

    def __init__(self, algebra: BlockAlgebra, support: Iterable[int]):
        support = tuple(sorted(set(int(i) for i in support)))
        if any(i < 0 or i >= algebra.k for i in support):
            raise AlgebraMismatch(f"support {support} outside block range 0..{algebra.k - 1}")
        self.algebra = algebra
        self.support = support

    def __ge__(self, other: "Seminorm") -> bool:
        return self.algebra == other.algebra and set(self.support) >= set(other.support)

    def __le__(self, other: "Seminorm") -> bool:
        return other >= self

    def __eq__(self, other):
        if not isinstance(other, Seminorm):
            return NotImplemented
        return self.algebra == other.algebra and self.support == other.support

    def __hash__(self):
        return hash((self.algebra, self.support))

    @property
    def quotient(self) -> BlockAlgebra:
        """The algebra ``A_p`` obtained by keeping the support blocks."""
        return self.algebra.restrict(self.support)

    def positions_in(self, larger: "Seminorm") -> list[int]:
        """Indices of this support inside the (renumbered) blocks of ``larger``."""
        if not larger >= self:
            raise NotComparable(f"support {self.support} is not contained in {larger.support}")
        where = {b: j for j, b in enumerate(larger.support)}
        return [where[b] for b in self.support]

    def __repr__(self):
        return f"Seminorm(support={list(self.support)})"


def alg_arith(op: str, a: AlgElem, b=None) -> AlgElem:
    """Dispatch ``add``, ``sub``, ``mul``, ``star`` or ``scalar`` on algebra elements."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "star":
        return a.star()
    if op == "scalar":
        return a * complex(b)
    raise ValueError(f"unknown operation {op!r}")


def _check_algebra(p: Seminorm, a: AlgElem):
    if p.algebra != a.algebra:
        raise AlgebraMismatch("seminorm and element live over different algebras")


def alg_seminorm(p: Seminorm, a: AlgElem) -> float:
    _check_algebra(p, a)
    return max((linalg.opnorm(a.blocks[i]) for i in p.support), default=0.0)


def alg_positive(a: AlgElem, tol: float | None = None) -> bool:
    """True iff every block is Hermitian with spectrum above ``-tol``.

    Default tolerance is ``1e-9 * (1 + max |entry|)``.
    """
    if tol is None:
        tol = 1e-9 * (1.0 + a.max_abs())
    for b in a.blocks:
        if np.max(np.abs(b - b.conj().T)) > tol:
            return False
        w, _ = linalg.hermitian_eig(b, tol=np.inf)
        if w[-1] < -tol:
            return False
    return True


def alg_localize(p: Seminorm, a: AlgElem) -> AlgElem:
    """Image ``π_p(a)`` in the quotient ``A_p``."""
    _check_algebra(p, a)
    return AlgElem(p.quotient, [a.blocks[i] for i in p.support])


def alg_connect(p: Seminorm, q: Seminorm, a_p: AlgElem) -> AlgElem:
    """Connecting map ``π_pq: A_p -> A_q`` for ``q <= p``."""
    pos = q.positions_in(p)
    if a_p.algebra != p.quotient:
        raise AlgebraMismatch("element does not live over the quotient of p")
    return AlgElem(q.quotient, [a_p.blocks[j] for j in pos])


def elem_pinv(a: AlgElem, rank_tol: float = linalg.RANK_RTOL) -> AlgElem:
    """Generalized inverse of an algebra element, computed block by block."""
    return AlgElem(a.algebra, [linalg.mat_pinv(b, rank_tol) for b in a.blocks])
