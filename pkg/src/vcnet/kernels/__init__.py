"""Backend selection for the graph kernels.

The numba backend is used when numba imports cleanly, unless the
environment variable ``VCNET_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``; then the vectorised numpy path runs instead.
"""

import os

from . import _numpy


def _numba_disabled():
    flag = os.environ.get("VCNET_DISABLE_NUMBA", "")
    return flag not in ("", "0")


if _numba_disabled():
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        _impl = _numpy
        BACKEND = "numpy"


def bfs_centrality(indptr, indices, with_betweenness=True):
    return _impl.bfs_centrality(indptr, indices, with_betweenness)


def burt_constraint(indptr, indices, weights):
    return _impl.burt_constraint(indptr, indices, weights)
