"""JSON documents for algebras, elements, vectors, submodules and maps.

Every document is an object ``{"version": "cstar-mod/1", "algebra": {"dims":
[...]}, <kind>: <payload>}`` with at most one payload key.  Complex numbers
are ``[re, im]`` pairs and matrices are row-major nested lists.  Payloads::

    element    {"blocks": [matrix, ...]}
    vector     {"coords": [element, ...]}
    submodule  {"rank": n, "generators": [vector, ...]}
    map        {"domain_rank": n, "codomain_rank": m, "entries": [[element, ...], ...]}
    rawmap     {"domain_rank": n, "codomain_rank": m, "blocks": [matrix, ...]}
    seminorm   {"support": [i, ...]}

Nested elements and vectors are bare payloads (no envelope).  Unknown keys are
rejected.
"""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .calgebra import AlgElem, BlockAlgebra, Seminorm
from .hilbmod import FreeModule, ModVector, Submodule
from .opmap import ModuleMap, RawLinearMap

VERSION = "cstar-mod/1"
KINDS = ("element", "vector", "submodule", "map", "rawmap", "seminorm")


class DocumentError(ValueError):
    """Malformed document; ``field`` is a dotted path to the offending value."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


# -- encoding -----------------------------------------------------------------

def encode_matrix(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]


def _encode_element(a: AlgElem) -> dict:
    return {"blocks": [encode_matrix(b) for b in a.blocks]}


def _encode_vector(x: ModVector) -> dict:
    return {"coords": [_encode_element(c) for c in x.coords]}


def to_document(obj) -> dict:
    """Wrap any supported object in a versioned document."""
    if isinstance(obj, BlockAlgebra):
        return {"version": VERSION, "algebra": {"dims": list(obj.dims)}}
    if isinstance(obj, AlgElem):
        alg, kind, payload = obj.algebra, "element", _encode_element(obj)
    elif isinstance(obj, ModVector):
        alg, kind, payload = obj.module.algebra, "vector", _encode_vector(obj)
    elif isinstance(obj, Submodule):
        alg, kind = obj.module.algebra, "submodule"
        payload = {"rank": obj.module.rank, "generators": [_encode_vector(g) for g in obj.generators]}
    elif isinstance(obj, ModuleMap):
        alg, kind = obj.algebra, "map"
        payload = {"domain_rank": obj.domain.rank, "codomain_rank": obj.codomain.rank,
                   "entries": [[_encode_element(e) for e in row] for row in obj.entries]}
    elif isinstance(obj, RawLinearMap):
        alg, kind = obj.algebra, "rawmap"
        payload = {"domain_rank": obj.domain_rank, "codomain_rank": obj.codomain_rank,
                   "blocks": [encode_matrix(b) for b in obj.blocks]}
    elif isinstance(obj, Seminorm):
        alg, kind, payload = obj.algebra, "seminorm", {"support": list(obj.support)}
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return {"version": VERSION, "algebra": {"dims": list(alg.dims)}, kind: payload}


def _fmt(x: Any) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x) or math.isnan(x):
            return json.dumps(str(x))
        s = format(x, ".17g")
        if not any(c in s for c in ".en"):
            s += ".0"
        return s
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot encode {type(x).__name__}")


def dumps(obj: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _fmt(obj)


# -- decoding -----------------------------------------------------------------

def _keys(obj, where: str, required: set, optional: set = frozenset()):
    if not isinstance(obj, dict):
        raise DocumentError(where, "expected an object")
    for k in obj:
        if k not in required and k not in optional:
            raise DocumentError(f"{where}.{k}" if where else k, "unknown field")
    for k in required:
        if k not in obj:
            raise DocumentError(f"{where}.{k}" if where else k, "missing field")


def _int(v, where: str, lo: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise DocumentError(where, f"expected an integer >= {lo}")
    return v


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise DocumentError(where, "expected a finite number")
    return float(v)


def decode_matrix(obj, where: str, shape: tuple[int, int]) -> np.ndarray:
    rows, cols = shape
    if not isinstance(obj, list) or len(obj) != rows:
        raise DocumentError(where, f"expected {rows} rows")
    out = np.zeros(shape, dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise DocumentError(f"{where}[{i}]", f"expected {cols} entries")
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise DocumentError(f"{where}[{i}][{j}]", "expected [re, im]")
            out[i, j] = complex(_number(z[0], f"{where}[{i}][{j}][0]"), _number(z[1], f"{where}[{i}][{j}][1]"))
    return out


def _decode_element(obj, where: str, alg: BlockAlgebra) -> AlgElem:
    _keys(obj, where, {"blocks"})
    blocks = obj["blocks"]
    if not isinstance(blocks, list) or len(blocks) != alg.k:
        raise DocumentError(f"{where}.blocks", f"expected {alg.k} blocks")
    return AlgElem(alg, [decode_matrix(b, f"{where}.blocks[{i}]", (d, d)) for i, (b, d) in enumerate(zip(blocks, alg.dims))])


def _decode_vector(obj, where: str, alg: BlockAlgebra, rank: int | None = None) -> ModVector:
    _keys(obj, where, {"coords"})
    coords = obj["coords"]
    if not isinstance(coords, list):
        raise DocumentError(f"{where}.coords", "expected a list")
    if rank is not None and len(coords) != rank:
        raise DocumentError(f"{where}.coords", f"expected {rank} coordinates")
    elems = [_decode_element(c, f"{where}.coords[{i}]", alg) for i, c in enumerate(coords)]
    return ModVector.from_coords(FreeModule(alg, len(coords)), elems)


def from_document(doc) -> Any:
    """Parse a document produced by :func:`to_document`."""
    if not isinstance(doc, dict):
        raise DocumentError("", "document must be an object")
    kinds = [k for k in KINDS if k in doc]
    if len(kinds) > 1:
        raise DocumentError(kinds[1], "more than one payload")
    if doc.get("version") != VERSION:
        raise DocumentError("version", f"expected {VERSION!r}")
    _keys(doc, "", {"version", "algebra"}, set(kinds))
    _keys(doc["algebra"], "algebra", {"dims"})
    dims = doc["algebra"]["dims"]
    if not isinstance(dims, list):
        raise DocumentError("algebra.dims", "expected a list")
    alg = BlockAlgebra(tuple(_int(d, f"algebra.dims[{i}]", 1) for i, d in enumerate(dims)))
    if not kinds:
        return alg
    kind = kinds[0]
    body = doc[kind]
    if kind == "element":
        return _decode_element(body, "element", alg)
    if kind == "vector":
        return _decode_vector(body, "vector", alg)
    if kind == "submodule":
        _keys(body, "submodule", {"rank", "generators"})
        rank = _int(body["rank"], "submodule.rank")
        gens = body["generators"]
        if not isinstance(gens, list):
            raise DocumentError("submodule.generators", "expected a list")
        vecs = [_decode_vector(g, f"submodule.generators[{i}]", alg, rank) for i, g in enumerate(gens)]
        return Submodule(FreeModule(alg, rank), vecs)
    if kind == "map":
        _keys(body, "map", {"domain_rank", "codomain_rank", "entries"})
        n = _int(body["domain_rank"], "map.domain_rank")
        m = _int(body["codomain_rank"], "map.codomain_rank")
        rows = body["entries"]
        if not isinstance(rows, list) or len(rows) != m:
            raise DocumentError("map.entries", f"expected {m} rows")
        entries = []
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise DocumentError(f"map.entries[{r}]", f"expected {n} entries")
            entries.append([_decode_element(e, f"map.entries[{r}][{c}]", alg) for c, e in enumerate(row)])
        if m == 0:
            return ModuleMap.zero(FreeModule(alg, n), FreeModule(alg, 0))
        return ModuleMap.from_entries(alg, entries, domain_rank=n)
    if kind == "rawmap":
        _keys(body, "rawmap", {"domain_rank", "codomain_rank", "blocks"})
        n = _int(body["domain_rank"], "rawmap.domain_rank")
        m = _int(body["codomain_rank"], "rawmap.codomain_rank")
        blocks = body["blocks"]
        if not isinstance(blocks, list) or len(blocks) != alg.k:
            raise DocumentError("rawmap.blocks", f"expected {alg.k} blocks")
        mats = [decode_matrix(b, f"rawmap.blocks[{i}]", (m * d * d, n * d * d))
                for i, (b, d) in enumerate(zip(blocks, alg.dims))]
        return RawLinearMap(alg, n, m, tuple(mats))
    _keys(body, "seminorm", {"support"})
    sup = body["support"]
    if not isinstance(sup, list):
        raise DocumentError("seminorm.support", "expected a list")
    idx = [_int(i, f"seminorm.support[{j}]") for j, i in enumerate(sup)]
    for j, i in enumerate(idx):
        if i >= alg.k:
            raise DocumentError(f"seminorm.support[{j}]", f"block index out of range 0..{alg.k - 1}")
    return Seminorm(alg, idx)


def loads(text: str) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("json", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return from_document(doc)
