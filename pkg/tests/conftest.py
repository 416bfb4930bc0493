import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vcnet import kernels, network  # noqa: E402
from vcnet.kernels import _numba, _numpy  # noqa: E402


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    impl = _numba if request.param == "numba" else _numpy
    monkeypatch.setattr(kernels, "_impl", impl)
    return request.param


def graph_from_index_edges(n, edges):
    """SyndicationGraph on ids n0..n{n-1} from ``(i, j, w)`` triples."""
    ids = [f"n{i}" for i in range(n)]
    return network.from_edges(ids, [(ids[i], ids[j], w) for i, j, w in edges])


def random_graph(rng, n, p, max_w=3):
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, int(rng.integers(1, max_w + 1))))
    return edges


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
