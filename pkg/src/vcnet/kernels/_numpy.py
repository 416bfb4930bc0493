"""Vectorised numpy/scipy.sparse versions of the graph kernels.

Shortest-path statistics run a level-synchronous BFS for a block of sources
at once, so each level is one sparse-dense product.
"""

import numpy as np
import scipy.sparse as sp

BLOCK = 256


def _adjacency(indptr, indices):
    n = len(indptr) - 1
    data = np.ones(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def bfs_centrality(indptr, indices, with_betweenness):
    n = len(indptr) - 1
    adj = _adjacency(indptr, indices)
    harm = np.zeros(n)
    bc = np.zeros(n)
    for start in range(0, n, BLOCK):
        sources = np.arange(start, min(start + BLOCK, n))
        b = len(sources)
        rows = np.arange(b)
        dist = np.full((b, n), -1, dtype=np.int64)
        sigma = np.zeros((b, n))
        dist[rows, sources] = 0
        sigma[rows, sources] = 1.0
        frontier = sigma.copy()
        depth = 0
        while True:
            # adj is symmetric: (adj @ F.T).T == F @ adj
            reach = np.asarray((adj @ frontier.T).T)
            new = (reach > 0) & (dist < 0)
            if not new.any():
                break
            depth += 1
            dist[new] = depth
            frontier = np.where(new, reach, 0.0)
            sigma += frontier
        with np.errstate(divide="ignore"):
            inv = np.where(dist > 0, 1.0 / np.maximum(dist, 1), 0.0)
        harm[sources] = inv.sum(axis=1)
        if not with_betweenness:
            continue
        delta = np.zeros((b, n))
        for d in range(depth, 0, -1):
            level = dist == d
            coef = np.zeros((b, n))
            coef[level] = (1.0 + delta[level]) / sigma[level]
            back = np.asarray((adj @ coef.T).T)
            prev = dist == d - 1
            delta[prev] += sigma[prev] * back[prev]
        delta[rows, sources] = 0.0
        bc += delta.sum(axis=0)
    return harm, bc


def burt_constraint(indptr, indices, weights):
    n = len(indptr) - 1
    w = sp.csr_matrix((np.asarray(weights, dtype=float), indices, indptr), shape=(n, n))
    strength = np.asarray(w.sum(axis=1)).ravel()
    p = sp.diags(1.0 / strength) @ w
    mask = w.copy()
    mask.data[:] = 1.0
    indirect = (p @ p).multiply(mask)
    direct_plus = (p + indirect).tocsr()
    return np.asarray(direct_plus.multiply(direct_plus).sum(axis=1)).ravel()
