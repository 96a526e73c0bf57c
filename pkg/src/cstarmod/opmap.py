"""Adjointable module maps between free Hilbert modules.

A map ``T: A^n -> A^m`` is an ``m x n`` matrix of algebra elements acting by
``(Tx)_i = sum_j t_ij x_j``.  It is stored per algebra block as the
``(m n_i) x (n n_i)`` left-multiplication matrix ``L_i`` that acts on the
stacked vector blocks ``X_i``.  Generalized inverses, square roots and
projectors of a left multiplication are left multiplications by the
corresponding blockwise matrices, so all operator numerics happen on ``L_i``.

A *raw* linear map is an arbitrary complex-linear map on the block
realization, stored per block as an ``(m n_i^2) x (n n_i^2)`` matrix acting on
``X_i`` flattened in row-major order.  :func:`module_map_recognize` decides
whether such a map commutes with the right action.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .calgebra import AlgElem, BlockAlgebra, Seminorm
from .errors import AlgebraMismatch, ModuleMismatch, NotAModuleMap, ShapeMismatch
from .hilbmod import FreeModule, ModVector, direct_sum, inner


class ModuleMap:
    __slots__ = ("domain", "codomain", "blocks")

    def __init__(self, domain: FreeModule, codomain: FreeModule, blocks):
        if domain.algebra != codomain.algebra:
            raise AlgebraMismatch("domain and codomain over different algebras")
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in blocks)
        dims = domain.algebra.dims
        if len(blocks) != len(dims):
            raise ShapeMismatch(f"expected {len(dims)} blocks, got {len(blocks)}")
        for i, (b, d) in enumerate(zip(blocks, dims)):
            want = (codomain.rank * d, domain.rank * d)
            if b.shape != want:
                raise ShapeMismatch(f"block {i} has shape {b.shape}, expected {want}")
        self.domain = domain
        self.codomain = codomain
        self.blocks = blocks

    @property
    def algebra(self) -> BlockAlgebra:
        return self.domain.algebra

    @classmethod
    def identity(cls, module: FreeModule) -> "ModuleMap":
        return cls(module, module, [np.eye(module.rank * d, dtype=complex) for d in module.algebra.dims])

    @classmethod
    def zero(cls, domain: FreeModule, codomain: FreeModule) -> "ModuleMap":
        dims = domain.algebra.dims
        return cls(domain, codomain, [np.zeros((codomain.rank * d, domain.rank * d), complex) for d in dims])

    @classmethod
    def from_entries(cls, algebra: BlockAlgebra, entries: Sequence[Sequence[AlgElem]],
                     domain_rank: int | None = None) -> "ModuleMap":
        m = len(entries)
        n = len(entries[0]) if m else (domain_rank or 0)
        if domain_rank is not None and m and n != domain_rank:
            raise ShapeMismatch(f"entries have {n} columns, domain rank is {domain_rank}")
        for row in entries:
            if len(row) != n:
                raise ShapeMismatch("ragged entry matrix")
            for e in row:
                if e.algebra != algebra:
                    raise AlgebraMismatch("entry over a different algebra")
        blocks = []
        for i, d in enumerate(algebra.dims):
            b = np.zeros((m * d, n * d), complex)
            for r in range(m):
                for c in range(n):
                    b[r * d:(r + 1) * d, c * d:(c + 1) * d] = entries[r][c].blocks[i]
            blocks.append(b)
        return cls(FreeModule(algebra, n), FreeModule(algebra, m), blocks)

    def entry(self, r: int, c: int) -> AlgElem:
        dims = self.algebra.dims
        return AlgElem(self.algebra, [b[r * d:(r + 1) * d, c * d:(c + 1) * d] for b, d in zip(self.blocks, dims)])

    @property
    def entries(self) -> list[list[AlgElem]]:
        return [[self.entry(r, c) for c in range(self.domain.rank)] for r in range(self.codomain.rank)]

    def apply(self, x: ModVector) -> ModVector:
        if x.module != self.domain:
            raise ModuleMismatch("vector is not in the domain")
        return ModVector(self.codomain, [l @ xb for l, xb in zip(self.blocks, x.blocks)])

    def adjoint(self) -> "ModuleMap":
        return ModuleMap(self.codomain, self.domain, [b.conj().T for b in self.blocks])

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if other.codomain != self.domain:
            raise ShapeMismatch("composition of incompatible maps")
        return ModuleMap(other.domain, self.codomain, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def _check(self, other: "ModuleMap"):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ShapeMismatch("maps have different shapes")

    def __add__(self, other):
        self._check(other)
        return ModuleMap(self.domain, self.codomain, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return ModuleMap(self.domain, self.codomain, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, c):
        return ModuleMap(self.domain, self.codomain, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)))

    __hash__ = None

    @property
    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks if b.size), default=0.0)

    def norm(self) -> float:
        """Full-support operator norm: max block spectral norm."""
        return max((linalg.opnorm(b) for b in self.blocks), default=0.0)

    def __repr__(self):
        return f"ModuleMap(dims={self.algebra.dims}, {self.domain.rank} -> {self.codomain.rank})"


@dataclass(frozen=True)
class RawLinearMap:
    """Arbitrary complex-linear map on the block realization of ``A^n``."""

    algebra: BlockAlgebra
    domain_rank: int
    codomain_rank: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in self.blocks)
        if len(blocks) != self.algebra.k:
            raise ShapeMismatch(f"expected {self.algebra.k} raw blocks, got {len(blocks)}")
        for i, (b, d) in enumerate(zip(blocks, self.algebra.dims)):
            want = (self.codomain_rank * d * d, self.domain_rank * d * d)
            if b.shape != want:
                raise ShapeMismatch(f"raw block {i} has shape {b.shape}, expected {want}")
        object.__setattr__(self, "blocks", blocks)

    def apply(self, x: ModVector) -> ModVector:
        """Apply to a vector; the result need not respect the right action."""
        if x.module != FreeModule(self.algebra, self.domain_rank):
            raise ModuleMismatch("vector is not in the domain")
        out = []
        for r, xb, d in zip(self.blocks, x.blocks, self.algebra.dims):
            out.append((r @ xb.reshape(-1)).reshape(self.codomain_rank * d, d))
        return ModVector(FreeModule(self.algebra, self.codomain_rank), out)

    def __eq__(self, other):
        if not isinstance(other, RawLinearMap):
            return NotImplemented
        return (self.algebra == other.algebra and self.domain_rank == other.domain_rank
                and self.codomain_rank == other.codomain_rank
                and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)))

    __hash__ = None


def raw_from_map(t: ModuleMap) -> RawLinearMap:
    """Left multiplication ``X -> L X`` written on row-major ``vec(X)``: ``L ⊗ I``."""
    blocks = [np.kron(l, np.eye(d)) for l, d in zip(t.blocks, t.algebra.dims)]
    return RawLinearMap(t.algebra, t.domain.rank, t.codomain.rank, tuple(blocks))


def _right_unit(rows: int, d: int, a: int, b: int) -> np.ndarray:
    # X -> X E_ab on row-major vec(X) for X of shape (rows, d)
    e = np.zeros((d, d))
    e[b, a] = 1.0
    return np.kron(np.eye(rows), e)


def module_map_recognize(r: RawLinearMap, tol: float = 1e-10) -> ModuleMap:
    """Recover the module map behind a raw linear map.

    A raw block commutes with right multiplication by every matrix unit
    ``E_ab`` of ``M_{n_i}`` exactly when it is ``L ⊗ I``; ``L`` is then read off
    the first diagonal stride, so a raw map built from ``L`` gives ``L`` back
    bit for bit.  Raises :class:`NotAModuleMap`
    at the first commutator whose spectral norm exceeds
    ``tol * (1 + ||raw block||)``.
    """
    n, m = r.domain_rank, r.codomain_rank
    blocks = []
    for i, (raw, d) in enumerate(zip(r.blocks, r.algebra.dims)):
        scale = 1.0 + linalg.opnorm(raw) if raw.size else 1.0
        for a in range(d):
            for b in range(d):
                comm = raw @ _right_unit(n * d, d, a, b) - _right_unit(m * d, d, a, b) @ raw
                res = linalg.opnorm(comm) if comm.size else 0.0
                if res > tol * scale:
                    raise NotAModuleMap(i, (a, b), res)
        blocks.append(raw[::d, ::d].copy())
    return ModuleMap(FreeModule(r.algebra, n), FreeModule(r.algebra, m), blocks)


def apply_op(t: ModuleMap, x: ModVector) -> ModVector:
    return t.apply(x)


def adjoint_op(t: ModuleMap) -> ModuleMap:
    return t.adjoint()


def op_seminorm(p: Seminorm, t: ModuleMap) -> float:
    """``p~(T)``: operator norm of the localized map, max over support blocks."""
    if p.algebra != t.algebra:
        raise AlgebraMismatch("seminorm over a different algebra")
    return max((linalg.opnorm(t.blocks[i]) for i in p.support if t.blocks[i].size), default=0.0)


def bound_constant(p: Seminorm, t: ModuleMap) -> float:
    """A constant ``K_p`` with ``p_F(Tx) <= K_p p_E(x)``; the seminorm itself is the best one."""
    return op_seminorm(p, t)


def default_tol(t: ModuleMap) -> float:
    return 1e-9 * (1.0 + t.norm())


def pinv_op(t: ModuleMap, rank_tol: float = linalg.RANK_RTOL) -> ModuleMap:
    """Generalized inverse ``T^+`` from blockwise matrix pseudoinverses.

    The pseudoinverse of ``L_i`` is again a left multiplication, so the
    reassembled blocks define the module map directly.
    """
    return ModuleMap(t.codomain, t.domain, [linalg.mat_pinv(b, rank_tol) for b in t.blocks])


def penrose_residuals(t: ModuleMap, s: ModuleMap) -> tuple[float, float, float, float]:
    """``||TsT - T||, ||sTs - s||, ||(Ts)* - Ts||, ||(sT)* - sT||``."""
    if s.domain != t.codomain or s.codomain != t.domain:
        raise ShapeMismatch("candidate inverse has the wrong shape")
    ts = t @ s
    st = s @ t
    return (
        (ts @ t - t).norm(),
        (st @ s - s).norm(),
        (ts.adjoint() - ts).norm(),
        (st.adjoint() - st).norm(),
    )


class PolarParts(NamedTuple):
    v: ModuleMap
    abs_t: ModuleMap


def abs_op(t: ModuleMap) -> ModuleMap:
    """``|T| = (T*T)^{1/2}``, blockwise positive square root."""
    blocks = []
    for b in t.blocks:
        g = b.conj().T @ b
        blocks.append(linalg.psd_sqrt(g, tol=np.inf) if g.size else g)
    return ModuleMap(t.domain, t.domain, blocks)


def polar_op(t: ModuleMap) -> PolarParts:
    """Polar decomposition ``T = V|T|`` with ``V = T |T|^+``."""
    abs_t = abs_op(t)
    return PolarParts(t @ pinv_op(abs_t), abs_t)


def kernel_range_projectors(t: ModuleMap) -> tuple[ModuleMap, ModuleMap]:
    """Projectors onto ``Ker(T)`` (``I - T^+T``) and ``Ran(T)`` (``TT^+``)."""
    s = pinv_op(t)
    return ModuleMap.identity(t.domain) - s @ t, t @ s


def polar_contract(t: ModuleMap, parts: PolarParts | None = None) -> dict[str, float]:
    """Residuals of every defining property of a polar decomposition.

    Kernel and range projectors of ``V`` and ``V*`` are computed from ``V``
    itself and compared with those of ``T``, ``T*`` and ``|T|``.
    """
    if parts is None:
        parts = polar_op(t)
    v, abs_t = parts
    ker_t, ran_t = kernel_range_projectors(t)
    ker_v, ran_v = kernel_range_projectors(v)
    ker_vs, ran_vs = kernel_range_projectors(v.adjoint())
    ker_ts, _ = kernel_range_projectors(t.adjoint())
    _, ran_abs = kernel_range_projectors(abs_t)
    return {
        "factorization": (t - v @ abs_t).norm(),
        "partial_isometry": (v @ v.adjoint() @ v - v).norm(),
        "kernel": (ker_v - ker_t).norm(),
        "range": (ran_v - ran_t).norm(),
        "adjoint_kernel": (ker_vs - ker_ts).norm(),
        "adjoint_range": (ran_vs - ran_abs).norm(),
    }


def graph_embedding(t: ModuleMap) -> ModuleMap:
    """``x -> (x, Tx)`` from ``E`` into ``E ⊕ F``."""
    s = direct_sum(t.domain, t.codomain)
    blocks = []
    for b in t.blocks:
        blocks.append(np.vstack([np.eye(b.shape[1], dtype=complex), b]))
    return ModuleMap(t.domain, s, blocks)


def graph_projector(t: ModuleMap) -> ModuleMap:
    """Orthogonal projection of ``E ⊕ F`` onto the graph ``{(x, Tx)}``."""
    g = graph_embedding(t)
    s = g.codomain
    return ModuleMap(s, s, [b @ linalg.mat_pinv(b, linalg.RANK_RTOL) for b in g.blocks])


def domain_part(e: FreeModule, s: FreeModule) -> ModuleMap:
    """``(x, y) -> x`` from ``E ⊕ F`` onto ``E``."""
    return ModuleMap(s, e, [np.eye(s.rank * d, dtype=complex)[: e.rank * d] for d in e.algebra.dims])


class GraphUnitary(NamedTuple):
    u: ModuleMap
    initial: ModuleMap
    final: ModuleMap
    residuals: tuple[float, float]


def graph_unitary(t: ModuleMap, p: Seminorm) -> GraphUnitary:
    """The isomorphism ``G(T)_p -> G(T_p)``, ``(x, Tx)_p -> (x_p, T_p x_p)``.

    Realized on ``E_p ⊕ F_p`` as ``[I; T_p] · [I 0] · P_{G(T)_p}``, a partial
    isometry with initial projection ``P_{G(T)_p}`` (the localized graph
    projector of ``T``) and final projection ``P_{G(T_p)}`` (the graph
    projector of the localized map).  ``residuals`` are
    ``||U*U - P_{G(T)_p}||`` and ``||UU* - P_{G(T_p)}||``.
    """
    from .invsys import localize_op

    initial = localize_op(p, graph_projector(t)).map
    tp = localize_op(p, t).map
    final = graph_projector(tp)
    u = graph_embedding(tp) @ domain_part(tp.domain, initial.domain) @ initial
    res = ((u.adjoint() @ u - initial).norm(), (u @ u.adjoint() - final).norm())
    return GraphUnitary(u, initial, final, res)


class BoundedBelow(NamedTuple):
    c: float
    degenerate: bool


def bounded_below_constant(t: ModuleMap, p: Seminorm, rank_tol: float = linalg.RANK_RTOL) -> BoundedBelow:
    """Largest ``c_p`` with ``p_F(Tx) >= c_p p_E(x)`` on ``Ker(T)^⊥``.

    It is the smallest nonzero singular value over the support blocks; blocks
    that vanish are skipped.  When every support block vanishes the constant
    is 0 and ``degenerate`` is set.
    """
    if p.algebra != t.algebra:
        raise AlgebraMismatch("seminorm over a different algebra")
    best = None
    for i in p.support:
        b = t.blocks[i]
        if not b.size:
            continue
        s = linalg.svd(b)[1]
        if s[0] == 0.0:
            continue
        nz = s[s > rank_tol * s[0]]
        best = nz[-1] if best is None else min(best, nz[-1])
    if best is None:
        return BoundedBelow(0.0, True)
    return BoundedBelow(float(best), False)


class OpFlags(NamedTuple):
    idempotent: bool
    projection: bool
    unitary: bool
    partial_isometry: bool
    selfadjoint: bool
    positive: bool


def is_partial_isometry(t: ModuleMap, tol: float) -> bool:
    return (t @ t.adjoint() @ t - t).norm() <= tol


def is_unitary(t: ModuleMap, tol: float) -> bool:
    return ((t.adjoint() @ t - ModuleMap.identity(t.domain)).norm() <= tol
            and (t @ t.adjoint() - ModuleMap.identity(t.codomain)).norm() <= tol)


def op_predicates(t: ModuleMap, tol: float | None = None) -> OpFlags:
    """Idempotent / projection / unitary / partial isometry / selfadjoint / positive."""
    if not t.is_endomorphism:
        raise ShapeMismatch("predicates need an endomorphism")
    if tol is None:
        tol = default_tol(t)
    idem = (t @ t - t).norm() <= tol
    selfadj = (t.adjoint() - t).norm() <= tol
    positive = selfadj
    if positive:
        for b in t.blocks:
            if b.size and linalg.hermitian_eig(b, tol=np.inf)[0][-1] < -tol:
                positive = False
                break
    return OpFlags(
        idempotent=idem,
        projection=idem and selfadj,
        unitary=is_unitary(t, tol),
        partial_isometry=is_partial_isometry(t, tol),
        selfadjoint=selfadj,
        positive=positive,
    )


def adjoint_pairing_residual(t: ModuleMap, x: ModVector, y: ModVector) -> float:
    """Full-support seminorm of ``<Tx, y> - <x, T*y>``."""
    d = inner(t.apply(x), y) - inner(x, t.adjoint().apply(y))
    return max((linalg.opnorm(b) for b in d.blocks), default=0.0)

