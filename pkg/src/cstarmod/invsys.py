"""Localization of module maps along the seminorm lattice.

``(π_p)_*(T)`` keeps the support blocks of every entry of ``T``; the
connecting maps ``(π_pq)_*`` drop further blocks.  :func:`commutation_suite`
checks that adjoints, generalized inverses, polar parts, range projectors and
the projection predicate are all computed "locally", i.e. commute with
localization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .calgebra import Seminorm
from .errors import AlgebraMismatch
from .hilbmod import FreeModule, ModVector, vec_localize
from .opmap import (
    ModuleMap,
    is_unitary,
    op_predicates,
    pinv_op,
    polar_op,
)

LAW_TOL = 1e-9


@dataclass(frozen=True)
class LocalizedOp:
    seminorm: Seminorm
    map: ModuleMap

    def __post_init__(self):
        if self.map.algebra != self.seminorm.quotient:
            raise AlgebraMismatch("localized map does not live over the quotient of its seminorm")


def localize_op(p: Seminorm, t: ModuleMap) -> LocalizedOp:
    if p.algebra != t.algebra:
        raise AlgebraMismatch("seminorm over a different algebra")
    q = p.quotient
    m = ModuleMap(FreeModule(q, t.domain.rank), FreeModule(q, t.codomain.rank), [t.blocks[i] for i in p.support])
    return LocalizedOp(p, m)


def connect_op(p: Seminorm, q: Seminorm, tp: LocalizedOp) -> LocalizedOp:
    """``(π_pq)_*``: restrict a map over ``A_p`` to ``A_q`` for ``q <= p``."""
    if tp.seminorm != p:
        raise AlgebraMismatch("localized map belongs to a different seminorm")
    pos = q.positions_in(p)
    a = q.quotient
    m = tp.map
    out = ModuleMap(FreeModule(a, m.domain.rank), FreeModule(a, m.codomain.rank), [m.blocks[j] for j in pos])
    return LocalizedOp(q, out)


def sample_seminorms(algebra, rng: np.random.Generator | None = None, count: int = 8) -> list[Seminorm]:
    """Every support when ``k <= 4``; otherwise full, singletons and a seeded sample."""
    if algebra.k <= 4:
        return algebra.all_seminorms()
    rng = rng or np.random.default_rng(0)
    chosen = {algebra.full()} | {algebra.seminorm([i]) for i in range(algebra.k)}
    while len(chosen) < count + algebra.k + 1:
        mask = rng.random(algebra.k) < 0.5
        chosen.add(algebra.seminorm(np.flatnonzero(mask)))
    return sorted(chosen, key=lambda p: (len(p.support), p.support))


def _diff(a: ModuleMap, b: ModuleMap) -> float:
    return (a - b).norm()


def _corrupt(t: ModuleMap, block: int, amount: float = 0.5) -> ModuleMap:
    blocks = list(t.blocks)
    b = blocks[block].copy()
    if b.size:
        b[0, -1] += amount
    blocks[block] = b
    return ModuleMap(t.domain, t.codomain, blocks)


def commutation_suite(t: ModuleMap, seminorms: Iterable[Seminorm] | None = None, trials: int = 1,
                      seed: int = 0, tol: float = LAW_TOL, corrupt_block: int | None = None) -> list[dict]:
    """Check that the operator constructions commute with localization.

    For every seminorm ``p`` the report gets one entry per law::

        {"law": name, "seminorm": [support], "residual": r, "pass": bool}

    Laws: ``action`` (``σ_p(Tx) = T_p σ_p(x)`` on ``trials`` random ``x``),
    ``adjoint``, ``pinv``, ``polar``, ``range_projector`` and
    ``projection_transfer``.  The last one is a biconditional: for the
    projection ``TT^+`` the global predicate must agree with all local ones,
    and after corrupting one block of it the global predicate must fail
    together with every localization that sees the corrupted block.

    ``corrupt_block`` is a test hook: the globally computed ``T*``, ``T^+``,
    ``V``, ``|T|`` and ``TT^+`` get one entry of that block perturbed before
    being compared, so every law touching that block must report failure.
    """
    alg = t.algebra
    seminorms = list(seminorms) if seminorms is not None else sample_seminorms(alg)
    rng = np.random.default_rng(seed)
    t_star = t.adjoint()
    t_pinv = pinv_op(t)
    v, abs_t = polar_op(t)
    ran = t @ t_pinv
    if corrupt_block is not None:
        t_star, t_pinv, v, abs_t, ran = (_corrupt(m, corrupt_block) for m in (t_star, t_pinv, v, abs_t, ran))
    ran_tol = max(tol, 1e-9 * (1.0 + ran.norm()))
    global_proj = op_predicates(ran, ran_tol).projection
    if corrupt_block is not None:
        bad_block = corrupt_block
    else:
        bad_block = int(rng.integers(alg.k))
    broken = _corrupt(ran, bad_block)
    broken_global = op_predicates(broken, ran_tol).projection

    xs = []
    for _ in range(trials):
        blocks = [rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape)
                  for b in t.domain.zero().blocks]
        xs.append(ModVector(t.domain, blocks))

    report = []

    def add(law, p, residual, ok=None):
        residual = float(residual)
        report.append({"law": law, "seminorm": list(p.support), "residual": residual,
                       "pass": bool(residual <= tol) if ok is None else bool(ok)})

    for p in seminorms:
        tp = localize_op(p, t).map
        loc = lambda m: localize_op(p, m).map  # noqa: E731
        act = 0.0
        for x in xs:
            lhs = vec_localize(p, t.apply(x))
            rhs = tp.apply(vec_localize(p, x))
            act = max(act, max((float(np.max(np.abs(a - b))) for a, b in zip(lhs.blocks, rhs.blocks) if a.size), default=0.0))
        add("action", p, act)
        add("adjoint", p, _diff(loc(t_star), tp.adjoint()))
        add("pinv", p, _diff(loc(t_pinv), pinv_op(tp)))
        vp, absp = polar_op(tp)
        add("polar", p, max(_diff(loc(v), vp), _diff(loc(abs_t), absp), _diff(tp, loc(v) @ absp)))
        add("range_projector", p, _diff(loc(ran), tp @ pinv_op(tp)))

        # TT^+ must be a projection globally and on p; the falsifying copy
        # must fail globally and exactly on the supports that see its bad block
        local_proj = op_predicates(loc(ran), ran_tol).projection
        local_broken = op_predicates(loc(broken), ran_tol).projection
        ok = (global_proj and local_proj and not broken_global
              and local_broken == (bad_block not in p.support))
        residual = (loc(ran) @ loc(ran) - loc(ran)).norm()
        add("projection_transfer", p, residual, ok)
    return report


def unitary_transfer(t: ModuleMap, seminorms: Iterable[Seminorm], tol: float = LAW_TOL) -> tuple[bool, bool]:
    """Global unitarity flag and the conjunction of the localized flags."""
    g = is_unitary(t, tol)
    local = all(is_unitary(localize_op(p, t).map, tol) for p in seminorms)
    return g, local


def report_summary(report: list[dict]) -> dict[str, dict]:
    """Worst residual and pass flag per law."""
    out: dict[str, dict] = {}
    for e in report:
        s = out.setdefault(e["law"], {"worst_residual": 0.0, "pass": True})
        s["worst_residual"] = max(s["worst_residual"], e["residual"])
        s["pass"] = s["pass"] and e["pass"]
    return out
