"""Command-line front end: ``cstarmod <command> ...``.

Exit codes: 0 success (or every verification check passed), 1 verification
failure, 2 malformed input.
"""
from __future__ import annotations

import argparse
import sys

from . import serialize
from .calgebra import AlgElem, Seminorm, alg_localize, elem_pinv
from .harness import TrialConfig, lemma_suite, verify_theorem
from .hilbmod import ModVector, Submodule, orth_complement, submodule_localize, vec_localize
from .invsys import localize_op
from .errors import CStarModError, NotAModuleMap
from .opmap import (
    ModuleMap,
    RawLinearMap,
    bounded_below_constant,
    graph_projector,
    module_map_recognize,
    penrose_residuals,
    pinv_op,
    polar_contract,
    polar_op,
)


class UsageError(Exception):
    pass


def _load(path: str, *kinds):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    obj = serialize.loads(text)
    if kinds and not isinstance(obj, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise serialize.DocumentError("kind", f"{path} holds a {type(obj).__name__}, expected {names}")
    return obj


def _ints(text: str, name: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated integers, got {text!r}") from None


def _support(obj, text: str) -> Seminorm:
    alg = obj.algebra if isinstance(obj, (AlgElem, ModuleMap, RawLinearMap)) else obj.module.algebra
    idx = _ints(text, "--support")
    if any(i < 0 or i >= alg.k for i in idx):
        raise UsageError(f"--support: block index out of range 0..{alg.k - 1}")
    return Seminorm(alg, idx)


def _doc(obj) -> dict:
    return serialize.to_document(obj)


def cmd_pinv(args):
    t = _load(args.file, ModuleMap)
    s = pinv_op(t)
    return {"pinv": _doc(s), "penrose_residuals": list(penrose_residuals(t, s))}, 0


def cmd_polar(args):
    t = _load(args.file, ModuleMap)
    parts = polar_op(t)
    return {"v": _doc(parts.v), "abs_t": _doc(parts.abs_t), "contract": polar_contract(t, parts)}, 0


def cmd_adjoint(args):
    return {"adjoint": _doc(_load(args.file, ModuleMap).adjoint())}, 0


def cmd_graph_proj(args):
    return {"graph_projector": _doc(graph_projector(_load(args.file, ModuleMap)))}, 0


def cmd_complement(args):
    return {"complement_projector": _doc(orth_complement(_load(args.file, Submodule)))}, 0


def cmd_check_raw(args):
    r = _load(args.file, RawLinearMap)
    try:
        t = module_map_recognize(r)
    except NotAModuleMap as exc:
        return {"module_map": False, "block": exc.block, "unit": list(exc.unit), "residual": exc.residual}, 0
    return {"module_map": True, "map": _doc(t)}, 0


def cmd_localize(args):
    obj = _load(args.file, AlgElem, ModVector, Submodule, ModuleMap)
    p = _support(obj, args.support)
    if isinstance(obj, AlgElem):
        out = alg_localize(p, obj)
    elif isinstance(obj, ModVector):
        out = vec_localize(p, obj)
    elif isinstance(obj, Submodule):
        out = submodule_localize(p, obj)
    else:
        out = localize_op(p, obj).map
    return {"support": list(p.support), "localized": _doc(out)}, 0


def cmd_c_bound(args):
    t = _load(args.file, ModuleMap)
    p = _support(t, args.support)
    c, degenerate = bounded_below_constant(t, p)
    return {"support": list(p.support), "c": c, "degenerate": degenerate}, 0


def cmd_elem_pinv(args):
    a = _load(args.file, AlgElem)
    ap = elem_pinv(a)
    res = [a * ap * a - a, ap * a * ap - ap, (a * ap).star() - a * ap, (ap * a).star() - ap * a]
    return {"pinv": _doc(ap), "penrose_residuals": [r.max_abs() for r in res]}, 0


def cmd_verify(args):
    dims = tuple(_ints(args.dims, "--dims"))
    try:
        cfg = TrialConfig(dims=dims, max_rank=args.max_rank, trials=args.trials, seed=args.seed, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.suite == "theorem":
        report = verify_theorem(cfg)
        entries = report.to_json()
    else:
        entries = [e.to_json() for e in lemma_suite(cfg)]
    ok = all(e["failures"] == 0 for e in entries)
    return {"suite": args.suite, "pass": ok, "report": entries}, 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cstarmod", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, helptext in [
        ("pinv", cmd_pinv, "generalized inverse of a map and its Penrose residuals"),
        ("polar", cmd_polar, "polar decomposition of a map"),
        ("adjoint", cmd_adjoint, "adjoint of a map"),
        ("graph-proj", cmd_graph_proj, "projection onto the graph of a map"),
        ("complement", cmd_complement, "projection onto the orthogonal complement of a submodule"),
        ("check-raw", cmd_check_raw, "decide whether a raw linear map is a module map"),
        ("elem-pinv", cmd_elem_pinv, "generalized inverse of an algebra element"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.set_defaults(func=fn)
    for name, fn, helptext in [
        ("localize", cmd_localize, "restrict a document to a block support"),
        ("c-bound", cmd_c_bound, "bounded-below constant of a map on a support"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--support", required=True, help="0-based comma-separated block indices")
        p.add_argument("file")
        p.set_defaults(func=fn)
    p = sub.add_parser("verify", help="run a randomized verification suite")
    p.add_argument("--suite", choices=("theorem", "lemmas"), default="theorem")
    p.add_argument("--dims", default="1,2")
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        result, code = args.func(args)
    except serialize.DocumentError as exc:
        print(f"error: invalid document field '{exc.field}': {exc}", file=stderr)
        return 2
    except (UsageError, CStarModError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    print(serialize.dumps(result), file=stdout)
    return code


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
