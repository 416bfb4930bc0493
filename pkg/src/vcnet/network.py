"""Two-mode investment network and its one-mode syndication projection."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .ingest import EventLog


class Mode(str, enum.Enum):
    SAME_ROUND = "same-round"
    DIFFERENT_ROUND = "different-round"

    @classmethod
    def parse(cls, text) -> "Mode":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown mode {text!r}; expected same-round or different-round")


@dataclass(frozen=True)
class BipartiteGraph:
    vc_nodes: tuple[str, ...]
    event_nodes: tuple
    incidence: frozenset  # of (vc_id, event_key)
    mode: Mode

    def incidence_matrix(self) -> sp.csr_matrix:
        """Binary firms x events matrix in ``vc_nodes`` / ``event_nodes`` order."""
        vi = {v: i for i, v in enumerate(self.vc_nodes)}
        ei = {e: i for i, e in enumerate(self.event_nodes)}
        pairs = sorted((vi[v], ei[e]) for v, e in self.incidence)
        rows = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        cols = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        data = np.ones(len(pairs), dtype=np.int64)
        return sp.csr_matrix(
            (data, (rows, cols)), shape=(len(self.vc_nodes), len(self.event_nodes))
        )


@dataclass(frozen=True)
class SyndicationGraph:
    """Undirected weighted firm-firm graph.

    Edges are stored once each as ``(i, j, w)`` with ``i < j`` indexing into
    ``nodes``; ``nodes`` is sorted by ``vc_id``.
    """

    nodes: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    mode: Mode | None = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric CSR arrays ``(indptr, indices, weights)``, neighbours sorted."""
        m = self.sparse().tocsr()
        m.sort_indices()
        return (
            m.indptr.astype(np.int64),
            m.indices.astype(np.int64),
            m.data.astype(np.float64),
        )

    def sparse(self) -> sp.csr_matrix:
        n = self.n
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        data = np.concatenate([self.weight, self.weight]).astype(np.float64)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.src, 1)
        np.add.at(deg, self.dst, 1)
        return deg

    def edges(self) -> list[tuple[str, str, int]]:
        return [
            (self.nodes[i], self.nodes[j], int(w))
            for i, j, w in zip(self.src, self.dst, self.weight)
        ]

    def write_edgelist(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for a, b, w in sorted(self.edges()):
                fh.write(f"{a},{b},{w}\n")


def from_edges(nodes, edges, mode: Mode | None = None) -> SyndicationGraph:
    """Build a graph from node ids and ``(a, b, weight)`` triples.

    Node order is normalised to sorted ids; parallel edges are summed.
    """
    ids = tuple(sorted(set(nodes)))
    index = {v: i for i, v in enumerate(ids)}
    acc: dict[tuple[int, int], int] = {}
    for a, b, w in edges:
        i, j = index[a], index[b]
        if i == j:
            raise ValueError(f"self-loop on {a}")
        if w < 1:
            raise ValueError(f"edge weight must be >= 1, got {w}")
        key = (i, j) if i < j else (j, i)
        acc[key] = acc.get(key, 0) + int(w)
    keys = sorted(acc)
    src = np.array([k[0] for k in keys], dtype=np.int64)
    dst = np.array([k[1] for k in keys], dtype=np.int64)
    wt = np.array([acc[k] for k in keys], dtype=np.int64)
    return SyndicationGraph(ids, src, dst, wt, mode)


def read_edgelist(path, nodes=None, mode: Mode | None = None) -> SyndicationGraph:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b, w = line.split(",")
            edges.append((a, b, int(w)))
    ids = set(nodes or ())
    for a, b, _ in edges:
        ids.update((a, b))
    return from_edges(ids, edges, mode)


def build_bipartite(log: EventLog, mode: Mode | str) -> BipartiteGraph:
    """Firms x events incidence; an event is a (company, round) or a company."""
    mode = Mode.parse(mode)
    if mode is Mode.SAME_ROUND:
        incidence = {(ev.vc_id, (ev.company_id, ev.round_id)) for ev in log.investments}
    else:
        incidence = {(ev.vc_id, ev.company_id) for ev in log.investments}
    vcs = tuple(sorted({v for v, _ in incidence}))
    events = tuple(sorted({e for _, e in incidence}))
    return BipartiteGraph(vcs, events, frozenset(incidence), mode)


def project(b: BipartiteGraph) -> SyndicationGraph:
    """One-mode projection onto firms; weight = number of shared event nodes."""
    inc = b.incidence_matrix()
    co = sp.triu(inc @ inc.T, k=1).tocoo()
    order = np.lexsort((co.col, co.row))
    return SyndicationGraph(
        b.vc_nodes,
        co.row[order].astype(np.int64),
        co.col[order].astype(np.int64),
        co.data[order].astype(np.int64),
        b.mode,
    )


def subgraph(g: SyndicationGraph, keep: np.ndarray) -> SyndicationGraph:
    """Induced subgraph on a boolean node mask, preserving node order."""
    keep = np.asarray(keep, dtype=bool)
    remap = np.cumsum(keep) - 1
    emask = keep[g.src] & keep[g.dst]
    nodes = tuple(v for v, k in zip(g.nodes, keep) if k)
    return SyndicationGraph(
        nodes, remap[g.src[emask]], remap[g.dst[emask]], g.weight[emask].copy(), g.mode
    )


def remove_isolates(g: SyndicationGraph) -> SyndicationGraph:
    return subgraph(g, g.degree() > 0)


def components(g: SyndicationGraph) -> list[list[str]]:
    """Connected components as sorted id lists, ordered by their first id."""
    if g.n == 0:
        return []
    _, labels = connected_components(g.sparse(), directed=False)
    groups: dict[int, list[str]] = {}
    for node, lab in zip(g.nodes, labels):
        groups.setdefault(int(lab), []).append(node)
    return sorted(groups.values())
