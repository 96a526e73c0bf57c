import numpy as np
import pytest

from cstarmod.calgebra import BlockAlgebra
from cstarmod.hilbmod import FreeModule
from cstarmod.opmap import ModuleMap


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def scalar_map(matrix):
    """A map over A = M_1 given by a plain complex matrix."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    alg = BlockAlgebra((1,))
    m, n = matrix.shape
    return ModuleMap(FreeModule(alg, n), FreeModule(alg, m), [matrix])


def block_dist(a, b):
    return max((float(np.max(np.abs(x - y))) for x, y in zip(a.blocks, b.blocks) if x.size), default=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


def report_criterion(number: int, title: str, ok: bool, detail: str = ""):
    """Record and print one verdict line for an acceptance criterion."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
