import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import graph_from_index_edges, random_graph
from vcnet.kernels import _numba, _numpy


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("VCNET_DISABLE_NUMBA", None)
    if flag is not None:
        env["VCNET_DISABLE_NUMBA"] = flag
    r = subprocess.run([sys.executable, "-c", "import vcnet; print(vcnet.BACKEND)"],
                       capture_output=True, text=True, env=env, check=True)
    return r.stdout.strip()


@pytest.mark.parametrize("flag,expected", [(None, "numba"), ("", "numba"), ("0", "numba"), ("1", "numpy"), ("yes", "numpy")])
def test_environment_flag_selects_backend(flag, expected):
    assert _backend_in_subprocess(flag) == expected


def test_raw_kernels_agree(rng):
    for n, p in ((50, 0.1), (200, 0.02), (300, 0.01)):
        g = graph_from_index_edges(n, random_graph(rng, n, p, max_w=5))
        indptr, indices, weights = g.csr
        h1, b1 = _numba.bfs_centrality(indptr, indices, True)
        h2, b2 = _numpy.bfs_centrality(indptr, indices, True)
        np.testing.assert_allclose(h1, h2, rtol=1e-13)
        np.testing.assert_allclose(b1, b2, rtol=1e-12, atol=1e-9)
        deg = np.diff(indptr)
        if deg.min() > 0:
            np.testing.assert_allclose(
                _numba.burt_constraint(indptr, indices, weights),
                _numpy.burt_constraint(indptr, indices, weights),
                rtol=1e-13,
            )


def test_numpy_batching_boundary(rng):
    # more sources than one batch exercises the block loop
    n = _numpy.BLOCK + 37
    g = graph_from_index_edges(n, random_graph(rng, n, 0.02))
    indptr, indices, _ = g.csr
    h1, b1 = _numba.bfs_centrality(indptr, indices, True)
    h2, b2 = _numpy.bfs_centrality(indptr, indices, True)
    np.testing.assert_allclose(h1, h2, rtol=1e-13)
    np.testing.assert_allclose(b1, b2, rtol=1e-12, atol=1e-9)
