"""Seeded random instances and the verification suites built on them.

Random entries have independent standard-normal real and imaginary parts.
Every trial draws from its own generator ``default_rng([seed, trial])`` so a
failing trial can be replayed alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import serialize
from .calgebra import AlgElem, BlockAlgebra, alg_localize, elem_pinv
from .hilbmod import (
    FreeModule,
    ModVector,
    Submodule,
    biorth_residual,
    inner,
    pair,
    submodule_localize,
    submodule_projector,
    vec_seminorm,
)
from .invsys import localize_op
from .opmap import (
    ModuleMap,
    RawLinearMap,
    adjoint_pairing_residual,
    bounded_below_constant,
    graph_projector,
    graph_unitary,
    kernel_range_projectors,
    module_map_recognize,
    penrose_residuals,
    pinv_op,
    polar_contract,
    raw_from_map,
)

CONDITIONS = (
    "orthogonal_complement",
    "biorthogonal_complement",
    "adjoint_exists",
    "kernel_summand",
    "range_summand",
    "polar_decomposition",
    "generalized_inverse",
    "topological_complement",
)

LEMMAS = (
    "idempotent_localization",
    "complement_localization",
    "closed_range_localization",
    "graph_isomorphism",
    "adjoint_localization",
    "graph_summand",
    "bounded_below",
    "generalized_inverse_existence",
    "element_generalized_inverse",
    "generalized_inverse_localization",
)


@dataclass(frozen=True)
class TrialConfig:
    dims: tuple[int, ...] = (1, 2)
    max_rank: int = 3
    trials: int = 100
    seed: int = 0
    tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims:
            raise ValueError("dims must be nonempty")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_rank < 1:
            raise ValueError("max_rank must be >= 1")

    @property
    def algebra(self) -> BlockAlgebra:
        return BlockAlgebra(self.dims)


# -- random instances ---------------------------------------------------------

def _gauss(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_element(rng: np.random.Generator, alg: BlockAlgebra) -> AlgElem:
    return AlgElem(alg, [_gauss(rng, (d, d)) for d in alg.dims])


def random_vector(rng: np.random.Generator, module: FreeModule) -> ModVector:
    return ModVector(module, [_gauss(rng, b.shape) for b in module.zero().blocks])


def random_map(rng: np.random.Generator, domain: FreeModule, codomain: FreeModule,
               low_rank: bool = False) -> ModuleMap:
    """Gaussian entries; with ``low_rank`` each block is a product through a random inner width."""
    blocks = []
    for d in domain.algebra.dims:
        m, n = codomain.rank * d, domain.rank * d
        if low_rank:
            r = int(rng.integers(0, min(m, n) + 1))
            blocks.append(_gauss(rng, (m, r)) @ _gauss(rng, (r, n)))
        else:
            blocks.append(_gauss(rng, (m, n)))
    return ModuleMap(domain, codomain, blocks)


def random_submodule(rng: np.random.Generator, module: FreeModule) -> Submodule:
    """0..rank+1 generators, sometimes with a duplicate or a right multiple of another."""
    count = int(rng.integers(0, module.rank + 2))
    gens = [random_vector(rng, module) for _ in range(count)]
    if gens and rng.random() < 0.3:
        gens.append(gens[0] * random_element(rng, module.algebra))
    return Submodule(module, gens)


def random_raw(rng: np.random.Generator, domain: FreeModule, codomain: FreeModule) -> RawLinearMap:
    """Raw realization of a random module map (left multiplication)."""
    return raw_from_map(random_map(rng, domain, codomain))


def _random_shape(rng: np.random.Generator, alg: BlockAlgebra, max_rank: int):
    n = int(rng.integers(1, max_rank + 1))
    m = int(rng.integers(1, max_rank + 1))
    return FreeModule(alg, n), FreeModule(alg, m)


def rand_gen(seed: int, kind: str, dims=(1, 2), rank: int = 2, codomain_rank: int | None = None):
    """Deterministic random ``element``, ``vector``, ``operator``, ``submodule`` or ``raw``."""
    rng = np.random.default_rng(seed)
    alg = BlockAlgebra(tuple(dims))
    e = FreeModule(alg, rank)
    f = FreeModule(alg, rank if codomain_rank is None else codomain_rank)
    if kind == "element":
        return random_element(rng, alg)
    if kind == "vector":
        return random_vector(rng, e)
    if kind == "operator":
        return random_map(rng, e, f)
    if kind == "submodule":
        return random_submodule(rng, e)
    if kind == "raw":
        return random_raw(rng, e, f)
    raise ValueError(f"unknown kind {kind!r}")


# -- reports ------------------------------------------------------------------

@dataclass
class ConditionResult:
    condition: str
    trials: int = 0
    failures: int = 0
    worst_residual: float = 0.0
    witness: dict | None = None

    def record(self, residual: float, tol: float, witness: Callable[[], dict]):
        self.trials += 1
        residual = float(residual)
        self.worst_residual = max(self.worst_residual, residual)
        if not residual <= tol:
            self.failures += 1
            if self.witness is None:
                self.witness = witness()

    def to_json(self) -> dict:
        return {"condition": self.condition, "trials": self.trials, "failures": self.failures,
                "worst_residual": self.worst_residual, "witness": self.witness}


@dataclass
class TheoremReport:
    entries: list[ConditionResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.failures == 0 for e in self.entries)

    def __getitem__(self, name: str) -> ConditionResult:
        for e in self.entries:
            if e.condition == name:
                return e
        raise KeyError(name)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def _witness(seed: int, trial: int, **docs) -> dict:
    out = {"seed": seed, "trial": trial}
    for k, v in docs.items():
        out[k] = serialize.to_document(v)
    return out


def _proj_residual(p: ModuleMap) -> float:
    return max((p @ p - p).norm(), (p.adjoint() - p).norm())


# -- the equivalence theorem --------------------------------------------------

def verify_theorem(cfg: TrialConfig, pinv: Callable[[ModuleMap], ModuleMap] = pinv_op) -> TheoremReport:
    """Check each condition equivalent to ``A`` being an algebra of compact operators.

    ``pinv`` is a test hook: a deliberately broken generalized inverse must
    make ``generalized_inverse`` report failures.
    """
    alg = cfg.algebra
    res = {c: ConditionResult(c) for c in CONDITIONS}
    tol = cfg.tol
    for trial in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, trial])
        e, f = _random_shape(rng, alg, cfg.max_rank)

        sub = random_submodule(rng, e)
        proj = submodule_projector(sub)
        x = random_vector(rng, e)
        w = lambda: _witness(cfg.seed, trial, submodule=sub)  # noqa: E731
        r = _proj_residual(proj)
        for g in sub.generators:
            r = max(r, _vec_dist(proj.apply(g), g))
            ortho = inner(g, x - proj.apply(x))
            r = max(r, max((float(np.max(np.abs(b))) for b in ortho.blocks), default=0.0))
        res["orthogonal_complement"].record(r, tol, w)
        res["biorthogonal_complement"].record(biorth_residual(sub), tol, w)
        # any idempotent onto F witnesses a topological complement; the
        # orthogonal projector is one
        r = (proj @ proj - proj).norm()
        for g in sub.generators:
            r = max(r, _vec_dist(proj.apply(g), g))
        r = max(r, (submodule_projector(sub) @ proj - proj).norm())
        res["topological_complement"].record(r, tol, w)

        t = random_map(rng, e, f, low_rank=bool(rng.random() < 0.4))
        w = lambda: _witness(cfg.seed, trial, map=t)  # noqa: E731
        x, y = random_vector(rng, e), random_vector(rng, f)
        recognized = module_map_recognize(raw_from_map(t))
        r = max(adjoint_pairing_residual(t, x, y), adjoint_pairing_residual(recognized, x, y),
                (recognized - t).norm())
        res["adjoint_exists"].record(r, tol, w)

        s = pinv(t)
        p_ker = ModuleMap.identity(t.domain) - s @ t
        p_ran = t @ s
        res["kernel_summand"].record(max(_proj_residual(p_ker), (t @ p_ker).norm()), tol, w)
        res["range_summand"].record(max(_proj_residual(p_ran), (p_ran @ t - t).norm()), tol, w)
        res["polar_decomposition"].record(max(polar_contract(t).values()), tol, w)
        res["generalized_inverse"].record(max(penrose_residuals(t, s)), tol, w)
    return TheoremReport([res[c] for c in CONDITIONS])


def _vec_dist(a: ModVector, b: ModVector) -> float:
    return max((float(np.max(np.abs(x - y))) for x, y in zip(a.blocks, b.blocks) if x.size), default=0.0)


def drop_range_symmetry_pinv(t: ModuleMap) -> ModuleMap:
    """A candidate inverse that keeps three Penrose identities and breaks ``(Ts)* = Ts``.

    ``s = T^+ + T^+ Z (I - T T^+)`` with a fixed all-ones ``Z``; it differs
    from ``T^+`` whenever ``T`` is not onto.
    """
    s = pinv_op(t)
    z = ModuleMap(t.codomain, t.codomain, [np.ones(b.shape, complex) for b in ModuleMap.identity(t.codomain).blocks])
    comp = ModuleMap.identity(t.codomain) - t @ s
    return s + s @ z @ comp


# -- lemma regression suite ---------------------------------------------------

def _oblique_idempotent(rng, module: FreeModule) -> ModuleMap:
    # W (Z* W)^{-1} Z*: idempotent onto span W along Ker Z*, not selfadjoint
    blocks = []
    for d in module.algebra.dims:
        n = module.rank * d
        r = int(rng.integers(1, n + 1))
        w = _gauss(rng, (n, r))
        z = w + 0.5 * _gauss(rng, (n, r))
        blocks.append(w @ np.linalg.solve(z.conj().T @ w, z.conj().T))
    return ModuleMap(module, module, blocks)


def _perturb(t: ModuleMap, block: int, amount: float = 0.5) -> ModuleMap:
    blocks = list(t.blocks)
    b = blocks[block].copy()
    b[0, -1] += amount
    blocks[block] = b
    return ModuleMap(t.domain, t.codomain, blocks)


@dataclass
class LemmaResult:
    lemma: str
    trials: int = 0
    failures: int = 0
    worst_residual: float = 0.0
    falsified: bool | None = None

    def record(self, residual: float, tol: float):
        self.trials += 1
        residual = float(residual)
        self.worst_residual = max(self.worst_residual, residual)
        if not residual <= tol:
            self.failures += 1

    def falsify(self, detected: bool):
        """Record the outcome of a perturbation branch; every one must be detected."""
        self.falsified = detected if self.falsified is None else (self.falsified and detected)
        if not detected:
            self.failures += 1

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "trials": self.trials, "failures": self.failures,
                "worst_residual": self.worst_residual, "falsified": self.falsified}


def lemma_suite(cfg: TrialConfig, samples: int = 50) -> list[LemmaResult]:
    """Per-lemma property checks on fresh random inputs.

    Biconditional statements also run a falsifying branch: one block of a
    valid witness is perturbed and the global and local predicates must both
    notice.
    """
    alg = cfg.algebra
    tol = cfg.tol
    res = {name: LemmaResult(name) for name in LEMMAS}
    seminorms = alg.all_seminorms() if alg.k <= 4 else [alg.full()] + [alg.seminorm([i]) for i in range(alg.k)]
    for trial in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, trial, 1])
        e, f = _random_shape(rng, alg, cfg.max_rank)
        t = random_map(rng, e, f, low_rank=bool(rng.random() < 0.4))
        s = pinv_op(t)
        bad = int(rng.integers(alg.k))

        # idempotents are detected block by block
        q = _oblique_idempotent(rng, e)
        r = (q @ q - q).norm()
        for p in seminorms:
            qp = localize_op(p, q).map
            r = max(r, (qp @ qp - qp).norm())
        res["idempotent_localization"].record(r, tol)
        broken = _perturb(q, bad)
        local_fail = [(lambda m: (m @ m - m).norm() > tol)(localize_op(p, broken).map) for p in seminorms]
        res["idempotent_localization"].falsify(
            (broken @ broken - broken).norm() > tol
            and all(fl == (bad in p.support) for fl, p in zip(local_fail, seminorms)))

        sub = random_submodule(rng, e)
        proj = submodule_projector(sub)
        r = 0.0
        for p in seminorms:
            r = max(r, (localize_op(p, proj).map - submodule_projector(submodule_localize(p, sub))).norm())
        res["complement_localization"].record(r, tol)

        r = 0.0
        for p in seminorms:
            tp = localize_op(p, t).map
            r = max(r, (localize_op(p, t @ s).map - tp @ pinv_op(tp)).norm())
            r = max(r, _proj_residual(tp @ pinv_op(tp)))
        res["closed_range_localization"].record(r, tol)

        r = max(max(graph_unitary(t, p).residuals) for p in seminorms)
        res["graph_isomorphism"].record(r, tol)

        x, y = random_vector(rng, e), random_vector(rng, f)
        r = 0.0
        for p in seminorms:
            tp = localize_op(p, t).map
            r = max(r, (localize_op(p, t.adjoint()).map - tp.adjoint()).norm())
        r = max(r, adjoint_pairing_residual(t, x, y))
        res["adjoint_localization"].record(r, tol)
        wrong = _perturb(t.adjoint(), bad)
        d = inner(t.apply(x), y) - inner(x, wrong.apply(y))
        res["adjoint_localization"].falsify(float(np.max(np.abs(d.blocks[bad]))) > tol
                                            and all(float(np.max(np.abs(d.blocks[i]))) <= tol
                                                    for i in range(alg.k) if i != bad))

        gp = graph_projector(t)
        r = _proj_residual(gp)
        z = pair(x, t.apply(x))
        r = max(r, _vec_dist(gp.apply(z), z))
        inv = pair(-t.adjoint().apply(y), y)
        r = max(r, _vec_dist(gp.apply(inv), ModVector(inv.module, [0 * b for b in inv.blocks])))
        res["graph_summand"].record(r, tol)

        r = 0.0
        for p in seminorms:
            c, _ = bounded_below_constant(t, p)
            for _ in range(samples):
                xk = _orth_kernel(s, t, rng, e)
                gap = c * vec_seminorm(p, xk) - vec_seminorm(p, t.apply(xk))
                r = max(r, gap)
        res["bounded_below"].record(max(r, 0.0), tol)

        r = max(penrose_residuals(t, s))
        r = max(r, _proj_residual(t @ s), _proj_residual(s @ t))
        res["generalized_inverse_existence"].record(r, tol)
        cand = drop_range_symmetry_pinv(t)
        if (cand - s).norm() > tol:
            res["generalized_inverse_existence"].falsify(max(penrose_residuals(t, cand)) > tol)

        a = random_element(rng, alg)
        if rng.random() < 0.5:
            a = a * AlgElem(alg, [np.diag((rng.random(d) < 0.5).astype(float)) for d in alg.dims])
        ap = elem_pinv(a)
        idem = a * ap
        r = max(_elem_norm(a * ap * a - a), _elem_norm(ap * a * ap - ap),
                _elem_norm((a * ap).star() - a * ap), _elem_norm((ap * a).star() - ap * a),
                _elem_norm(idem * idem - idem), _elem_norm(idem * a - a))
        res["element_generalized_inverse"].record(r, tol)

        r = 0.0
        for p in seminorms:
            tp = localize_op(p, t).map
            r = max(r, (localize_op(p, s).map - pinv_op(tp)).norm())
            if alg_localize(p, ap) != elem_pinv(alg_localize(p, a)):
                r = max(r, np.inf)
        res["generalized_inverse_localization"].record(r, tol)
    return [res[name] for name in LEMMAS]


def _orth_kernel(s: ModuleMap, t: ModuleMap, rng, e: FreeModule) -> ModVector:
    # a random vector of Ker(T)^⊥ = Ran(T^+ T)
    return (s @ t).apply(random_vector(rng, e))


def _elem_norm(a: AlgElem) -> float:
    return max((float(np.max(np.abs(b))) for b in a.blocks), default=0.0)
