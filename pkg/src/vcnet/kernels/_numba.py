"""numba kernels over symmetric CSR adjacency (neighbour lists sorted)."""

import numpy as np
from numba import njit


@njit(cache=True)
def bfs_centrality(indptr, indices, with_betweenness):
    """Per-node harmonic distance sums and raw Brandes dependencies.

    Returns ``(harm, bc)`` where ``harm[i] = sum_j 1/d(i, j)`` and ``bc`` holds
    dependencies summed over all sources (each unordered pair counted twice).
    """
    n = indptr.shape[0] - 1
    harm = np.zeros(n)
    bc = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                    harm[s] += 1.0 / (dv + 1)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        if not with_betweenness:
            continue
        for t in range(tail):
            delta[order[t]] = 0.0
        for t in range(tail - 1, 0, -1):
            w = order[t]
            coef = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coef
            bc[w] += delta[w]
    return harm, bc


@njit(cache=True)
def burt_constraint(indptr, indices, weights):
    n = indptr.shape[0] - 1
    strength = np.zeros(n)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            strength[i] += weights[k]
    out = np.zeros(n)
    share = np.zeros(n)
    for i in range(n):
        si = strength[i]
        for k in range(indptr[i], indptr[i + 1]):
            share[indices[k]] = weights[k] / si
        total = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            indirect = 0.0
            for m in range(indptr[j], indptr[j + 1]):
                q = indices[m]
                if share[q] != 0.0:
                    indirect += share[q] * weights[m] / strength[q]
            c = share[j] + indirect
            total += c * c
        out[i] = total
        for k in range(indptr[i], indptr[i + 1]):
            share[indices[k]] = 0.0
    return out
