import io
import json
import subprocess
import sys

import numpy as np
import pytest

from cstarmod import serialize
from cstarmod.calgebra import BlockAlgebra
from cstarmod.cli import run
from cstarmod.harness import rand_gen
from cstarmod.opmap import RawLinearMap, pinv_op


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def embedded_documents(obj):
    """Every value in a CLI result that is itself a versioned document."""
    if isinstance(obj, dict):
        if obj.get("version") == serialize.VERSION:
            yield obj
            return
        for v in obj.values():
            yield from embedded_documents(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from embedded_documents(v)


def transpose_raw():
    perm = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            perm[j * 2 + i, i * 2 + j] = 1.0
    return RawLinearMap(BlockAlgebra((2,)), 1, 1, (perm,))


@pytest.fixture
def fixtures(tmp_path):
    docs = {
        "map": rand_gen(1, "operator", dims=(1, 2), rank=2, codomain_rank=3),
        "square": rand_gen(2, "operator", dims=(1, 2), rank=2),
        "submodule": rand_gen(3, "submodule", dims=(1, 2), rank=3),
        "element": rand_gen(4, "element", dims=(1, 2, 2)),
        "vector": rand_gen(5, "vector", dims=(1, 2, 2)),
        "raw": rand_gen(6, "raw", dims=(1, 2)),
        "transpose": transpose_raw(),
    }
    paths = {}
    for name, obj in docs.items():
        path = tmp_path / f"{name}.json"
        path.write_text(serialize.dumps(serialize.to_document(obj)))
        paths[name] = str(path)
    bad = tmp_path / "bad.json"
    d = serialize.to_document(docs["map"])
    d["map"]["entries"][0].pop()
    bad.write_text(json.dumps(d))
    paths["bad"] = str(bad)
    (tmp_path / "garbage.json").write_text("not json")
    paths["garbage"] = str(tmp_path / "garbage.json")
    paths["missing"] = str(tmp_path / "nope.json")
    return docs, paths


SUCCESS = [
    ("pinv", "map"),
    ("polar", "square"),
    ("adjoint", "map"),
    ("graph-proj", "map"),
    ("complement", "submodule"),
    ("check-raw", "raw"),
    ("check-raw", "transpose"),
    ("elem-pinv", "element"),
]


@pytest.mark.parametrize("cmd,doc", SUCCESS)
def test_success_and_round_trip(fixtures, cmd, doc):
    _, paths = fixtures
    code, out, err = invoke(cmd, paths[doc])
    assert code == 0 and err == ""
    result = json.loads(out)
    docs = list(embedded_documents(result))
    if cmd != "check-raw" or doc == "raw":
        assert docs
    for d in docs:
        obj = serialize.from_document(d)
        assert serialize.to_document(obj) == d
        assert serialize.from_document(json.loads(serialize.dumps(serialize.to_document(obj)))) == obj


@pytest.mark.parametrize("doc", ["element", "vector", "submodule", "map"])
def test_localize(fixtures, doc):
    _, paths = fixtures
    code, out, _ = invoke("localize", "--support", "0,1", paths[doc])
    assert code == 0
    result = json.loads(out)
    assert result["support"] == [0, 1]
    obj = serialize.from_document(result["localized"])
    assert serialize.to_document(obj) == result["localized"]


def test_pinv_matches_library(fixtures):
    docs, paths = fixtures
    _, out, _ = invoke("pinv", paths["map"])
    result = json.loads(out)
    assert serialize.from_document(result["pinv"]) == pinv_op(docs["map"])
    assert max(result["penrose_residuals"]) <= 1e-9


def test_check_raw_verdicts(fixtures):
    docs, paths = fixtures
    result = json.loads(invoke("check-raw", paths["transpose"])[1])
    assert result["module_map"] is False and result["residual"] >= 0.5 and result["block"] == 0
    result = json.loads(invoke("check-raw", paths["raw"])[1])
    assert result["module_map"] is True


def test_c_bound(fixtures):
    _, paths = fixtures
    code, out, _ = invoke("c-bound", "--support", "1", paths["map"])
    assert code == 0
    result = json.loads(out)
    assert result["c"] > 0 and result["degenerate"] is False


def test_verify_exit_zero():
    code, out, _ = invoke("verify", "--suite", "theorem", "--dims", "1,2", "--trials", "100", "--seed", "42", "--tol", "1e-8")
    assert code == 0
    result = json.loads(out)
    assert result["pass"] is True
    assert all(e["failures"] == 0 for e in result["report"])


def test_verify_lemmas():
    code, out, _ = invoke("verify", "--suite", "lemmas", "--dims", "1,2", "--trials", "3")
    assert code == 0 and json.loads(out)["pass"]


def test_verify_failure_exit_one():
    # a tolerance below rounding error cannot be met
    code, out, _ = invoke("verify", "--trials", "5", "--tol", "1e-30")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_seventeen_digit_output(fixtures):
    _, paths = fixtures
    out = invoke("c-bound", "--support", "0,1", paths["map"])[1]
    c = json.loads(out)["c"]
    assert f'"c": {c:.17g}' in out


@pytest.mark.parametrize("argv,needle", [
    (("pinv", "{bad}"), "entries"),
    (("pinv", "{garbage}"), "json"),
    (("pinv", "{missing}"), "nope.json"),
    (("pinv", "{element}"), "kind"),
    (("complement", "{map}"), "kind"),
    (("localize", "--support", "7", "{map}"), "--support"),
    (("localize", "--support", "a", "{map}"), "--support"),
    (("c-bound", "--support", "0", "{raw}"), "kind"),
    (("verify", "--dims", "", "--trials", "1"), "dims"),
    (("verify", "--tol", "-1"), "tol"),
    (("frobnicate",), None),
    (("pinv",), None),
])
def test_exit_two(fixtures, argv, needle):
    _, paths = fixtures
    argv = [a.format(**paths) for a in argv]
    code, out, err = invoke(*argv)
    assert code == 2 and out == ""
    if needle is not None:
        lines = err.strip().splitlines()
        assert len(lines) == 1 and needle in lines[0].lower()


def test_console_script(fixtures):
    _, paths = fixtures
    proc = subprocess.run([sys.executable, "-m", "cstarmod.cli", "adjoint", paths["map"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "adjoint" in json.loads(proc.stdout)
