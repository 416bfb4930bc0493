"""Social-capital indicators on a syndication graph.

Closeness and betweenness use hop-count shortest paths; edge weights only
enter weighted degree (node strength) and Burt's constraint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GraphError
from .network import SyndicationGraph

SC_COLUMNS = ("weighted_degree", "closeness", "betweenness", "structural_hole")


class HoleForm(str, enum.Enum):
    CONSTRAINT = "constraint"
    ONE_MINUS_CONSTRAINT = "complement"

    @classmethod
    def parse(cls, text) -> "HoleForm":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {"one_minus_constraint": "complement", "one-minus-constraint": "complement"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class NodeVector:
    values: np.ndarray
    label: str
    scaled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self):
        return len(self.values)


def weighted_degree(g: SyndicationGraph) -> NodeVector:
    """Node strength: sum of incident edge weights."""
    if g.n < 1:
        raise GraphError("EMPTY_GRAPH", "weighted degree needs at least one node")
    s = np.zeros(g.n)
    np.add.at(s, g.src, g.weight)
    np.add.at(s, g.dst, g.weight)
    return NodeVector(s, "weighted_degree")


def _harmonic(g, harm_sum):
    return NodeVector(harm_sum / (g.n - 1), "closeness")


def _normalised_betweenness(g, raw):
    # raw counts each unordered pair from both endpoints
    pairs = (g.n - 1) * (g.n - 2) / 2.0
    return NodeVector(raw / 2.0 / pairs, "betweenness")


def closeness(g: SyndicationGraph) -> NodeVector:
    """Harmonic closeness ``(1/(n-1)) * sum_j 1/d(i, j)``; unreachable terms are 0."""
    if g.n < 2:
        raise GraphError("SINGLE_NODE", "closeness needs at least two nodes")
    indptr, indices, _ = g.csr
    harm, _ = kernels.bfs_centrality(indptr, indices, False)
    return _harmonic(g, harm)


def betweenness(g: SyndicationGraph) -> NodeVector:
    """Brandes betweenness normalised by ``(n-1)(n-2)/2`` unordered pairs.

    Raises
    ------
    GraphError
        ``TOO_SMALL`` for graphs with fewer than three nodes.
    """
    if g.n < 3:
        raise GraphError("TOO_SMALL", "betweenness needs at least three nodes")
    indptr, indices, _ = g.csr
    _, raw = kernels.bfs_centrality(indptr, indices, True)
    return _normalised_betweenness(g, raw)


def constraint(g: SyndicationGraph) -> NodeVector:
    r"""Burt's constraint with proportional tie strengths.

    ``c_i = sum_{j in N(i)} (p_ij + sum_{q != i, j} p_iq p_qj)^2`` where
    ``p_ij = w_ij / sum_q w_iq``.
    """
    if g.n and (g.degree() == 0).any():
        raise GraphError("ISOLATE_PRESENT", "remove isolates before computing constraint")
    indptr, indices, weights = g.csr
    return NodeVector(kernels.burt_constraint(indptr, indices, weights), "structural_hole")


def structural_hole(g: SyndicationGraph, form: HoleForm | str = HoleForm.CONSTRAINT) -> NodeVector:
    c = constraint(g)
    if HoleForm.parse(form) is HoleForm.ONE_MINUS_CONSTRAINT:
        return NodeVector(1.0 - c.values, c.label)
    return c


def scale_minmax(v: NodeVector) -> NodeVector:
    """Map values onto [0, 1]; a constant vector maps to all zeros."""
    x = v.values
    if len(x) == 0:
        raise GraphError("EMPTY_VECTOR", "cannot scale an empty vector")
    lo, hi = x.min(), x.max()
    if hi == lo:
        return NodeVector(np.zeros_like(x), v.label, True)
    out = (x - lo) / (hi - lo)
    # guard against 1 + eps from rounding
    return NodeVector(np.clip(out, 0.0, 1.0), v.label, True)


def metric_suite(
    g: SyndicationGraph, form: HoleForm | str = HoleForm.CONSTRAINT
) -> dict[str, NodeVector]:
    """All four indicators, sharing one BFS sweep for closeness and betweenness."""
    if g.n < 3:
        raise GraphError("TOO_SMALL", "metric suite needs at least three nodes")
    indptr, indices, _ = g.csr
    harm, raw = kernels.bfs_centrality(indptr, indices, True)
    return {
        "weighted_degree": weighted_degree(g),
        "closeness": _harmonic(g, harm),
        "betweenness": _normalised_betweenness(g, raw),
        "structural_hole": structural_hole(g, form),
    }


def write_metric_table(path, g: SyndicationGraph, suite: dict[str, NodeVector]) -> None:
    """Raw and min-max scaled columns, one row per node in graph order."""
    raw = [suite[c].values for c in SC_COLUMNS]
    scaled = [scale_minmax(suite[c]).values for c in SC_COLUMNS]
    header = ["vc_id", *SC_COLUMNS, *(f"{c}_scaled" for c in SC_COLUMNS)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i, node in enumerate(g.nodes):
            vals = [repr(float(col[i])) for col in (*raw, *scaled)]
            fh.write(",".join([node, *vals]) + "\n")


def read_metric_table(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Inverse of :func:`write_metric_table` for the raw columns."""
    ids, cols = [], {c: [] for c in SC_COLUMNS}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        pos = {name: k for k, name in enumerate(header)}
        for line in fh:
            parts = line.rstrip("\n").split(",")
            ids.append(parts[0])
            for c in SC_COLUMNS:
                cols[c].append(float(parts[pos[c]]))
    return ids, {c: np.array(v) for c, v in cols.items()}
