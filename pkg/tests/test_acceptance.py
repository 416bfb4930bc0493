"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the report.
"""

import itertools
import json
import math
import os
import time

import numpy as np
import pytest

import oracles
from conftest import graph_from_index_edges, random_graph
from semcases import fd_gradient, random_params, random_pd, theta_star
from vcnet import cli, ingest, kernels, metrics, network, perfstats, report, sem
from vcnet.network import Mode


VERDICTS = []


def verdict(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f" ({detail})"
    VERDICTS.append(line)
    print("\n" + line)
    assert ok, line


def _connected(n, mask):
    adj = mask | mask.T
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for u in np.flatnonzero(adj[v]):
            if u not in seen:
                seen.add(int(u))
                frontier.append(int(u))
    return len(seen) == n


def _suite(g):
    out = {"weighted_degree": metrics.weighted_degree(g).values, "closeness": metrics.closeness(g).values}
    if g.n >= 3:
        out["betweenness"] = metrics.betweenness(g).values
    out["structural_hole"] = metrics.constraint(g).values
    return out


def test_c01_centrality_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    graphs = 0
    for n in range(2, 7):
        pairs = list(itertools.combinations(range(n), 2))
        stack_adj, stack_w, edge_lists = [], [], []
        for bits in range(1, 1 << len(pairs)):
            mask = np.zeros((n, n), dtype=bool)
            chosen = [pairs[k] for k in range(len(pairs)) if bits >> k & 1]
            for i, j in chosen:
                mask[i, j] = True
            if not _connected(n, mask):
                continue
            edges = [(i, j, int(rng.integers(1, 4))) for i, j in chosen]
            w = oracles.dense(n, edges)
            stack_adj.append(w > 0)
            stack_w.append(w)
            edge_lists.append(edges)
        s, c, b, k = oracles.batched_metrics(np.array(stack_adj), np.array(stack_w))
        for idx, edges in enumerate(edge_lists):
            got = _suite(graph_from_index_edges(n, edges))
            diffs = [np.max(np.abs(got["weighted_degree"] - s[idx])),
                     np.max(np.abs(got["closeness"] - c[idx])),
                     np.max(np.abs(got["structural_hole"] - k[idx]))]
            if n >= 3:
                diffs.append(np.max(np.abs(got["betweenness"] - b[idx])))
            worst = max(worst, *diffs)
        graphs += len(edge_lists)

    rng = np.random.default_rng(2)
    for _ in range(200):
        n = int(rng.integers(3, 10))
        edges = random_graph(rng, n, rng.uniform(0.15, 0.9))
        g = graph_from_index_edges(n, edges)
        w = oracles.dense(n, edges)
        diffs = [
            np.max(np.abs(metrics.weighted_degree(g).values - oracles.strength(w))),
            np.max(np.abs(metrics.closeness(g).values - oracles.harmonic_closeness(w))),
            np.max(np.abs(metrics.betweenness(g).values - oracles.betweenness(w))),
        ]
        keep = np.flatnonzero(w.sum(axis=1) > 0)
        if len(keep):
            h = network.remove_isolates(g)
            diffs.append(np.max(np.abs(metrics.constraint(h).values - oracles.constraint(w)[keep])))
        worst = max(worst, *diffs)
        graphs += 1
    elapsed = time.perf_counter() - start
    verdict(1, "centrality matches brute force", worst <= 1e-9 and elapsed < 60,
            f"{graphs} graphs, max abs err {worst:.1e}, {elapsed:.1f}s, backend {kernels.BACKEND}")


def test_c02_hand_fixtures():
    p3 = graph_from_index_edges(3, [(0, 1, 1), (1, 2, 1)])
    tri = graph_from_index_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    star = graph_from_index_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    checks = [
        np.allclose(metrics.betweenness(p3).values, [0, 1, 0], rtol=0, atol=1e-12),
        np.allclose(metrics.closeness(p3).values, [0.75, 1.0, 0.75], rtol=0, atol=1e-12),
        np.allclose(metrics.constraint(tri).values, 1.125, rtol=0, atol=1e-12),
        np.allclose(metrics.constraint(star).values, [1 / 3, 1, 1, 1], rtol=0, atol=1e-12),
    ]
    verdict(2, "P3, triangle and star fixtures", all(checks), f"{sum(checks)}/4 fixtures")


def _log(triples):
    d = ingest._parse_date("2012-01-01")
    return ingest.build_event_log([ingest.InvestmentEvent(v, c, r, d, 1.0) for v, c, r in triples], [])


def _weights(triples, mode):
    members = {}
    for v, c, r in triples:
        members.setdefault((c, r) if mode is Mode.SAME_ROUND else c, set()).add(v)
    firms = sorted({v for v, _, _ in triples})
    out = {}
    for a, b in itertools.combinations(firms, 2):
        w = sum(1 for m in members.values() if a in m and b in m)
        if w:
            out[(a, b)] = w
    return out


def test_c03_projection_semantics():
    fixture = [("A", "C1", "R1"), ("B", "C1", "R1"), ("C", "C1", "R2")]
    same = network.project(network.build_bipartite(_log(fixture), Mode.SAME_ROUND)).edges()
    diff = network.project(network.build_bipartite(_log(fixture), Mode.DIFFERENT_ROUND)).edges()
    ok = same == [("A", "B", 1)] and sorted(diff) == [("A", "B", 1), ("A", "C", 1), ("B", "C", 1)]
    rng = np.random.default_rng(3)
    bad = 0
    for _ in range(100):
        triples = [(f"V{rng.integers(10)}", f"C{rng.integers(8)}", f"R{rng.integers(3)}")
                   for _ in range(int(rng.integers(5, 40)))]
        log = _log(triples)
        e = {}
        for mode in Mode:
            got = network.project(network.build_bipartite(log, mode)).edges()
            e[mode] = {(a, b): w for a, b, w in got}
            bad += e[mode] != _weights(triples, mode)
        bad += not set(e[Mode.SAME_ROUND]) <= set(e[Mode.DIFFERENT_ROUND])
    verdict(3, "projection fixture, subset and set-intersection weights", ok and bad == 0,
            f"{bad} mismatches over 100 logs")


def test_c04_ml_discrepancy():
    rng = np.random.default_rng(4)
    self_max = max(sem.fml(S, S) for S in (random_pd(rng, int(rng.integers(2, 11))) for _ in range(100)))
    hand = abs(sem.fml(np.diag([2.0, 2.0]), np.eye(2)) - (2 - 2 * math.log(2)))
    neg = 0
    for _ in range(1000):
        p = int(rng.integers(2, 11))
        neg += sem.fml(random_pd(rng, p), random_pd(rng, p)) < 0
    ok = self_max < 1e-10 and hand < 1e-12 and neg == 0
    verdict(4, "ML discrepancy zero, hand value, nonnegative", ok,
            f"max F(S,S) {self_max:.1e}, hand err {hand:.1e}, {neg} negatives")


def test_c05_gradient_check():
    rng = np.random.default_rng(5)
    spec = sem.build_model(1)
    worst = 0.0
    for _ in range(100):
        S = sem.sample_covariance(sem.simulate(spec, random_params(spec, rng), 200, int(rng.integers(1 << 31))))
        obj = sem.Discrepancy(S, spec)
        u = sem.to_unconstrained(spec, random_params(spec, rng))
        fd = fd_gradient(obj.value, u, 1e-6)
        worst = max(worst, np.linalg.norm(obj.gradient(u) - fd) / np.linalg.norm(fd))
    verdict(5, "analytic gradient vs central differences", worst < 1e-5, f"max rel err {worst:.1e}")


def test_c06_parameter_recovery():
    start = time.perf_counter()
    spec = sem.build_model(1)
    truth = theta_star(spec).pack()
    inside = total = 0
    failed = 0
    for rep in range(20):
        x = sem.simulate(spec, theta_star(spec), 50_000, 600 + rep)
        fit = sem.fit(sem.sample_covariance(x), spec, 50_000)
        failed += not fit.converged
        inside += int(np.sum(np.abs(fit.estimate_vector() - truth) <= 3 * fit.se_vector()))
        total += spec.n_free
    elapsed = time.perf_counter() - start
    rate = inside / total
    verdict(6, "recovery within 3 SE at n=50,000", rate >= 0.95 and elapsed < 120 and failed == 0,
            f"{rate:.1%} of {total}, {failed} non-converged, {elapsed:.1f}s")


def test_c07_se_calibration():
    spec = sem.build_model(1)
    est, ses = [], []
    for rep in range(200):
        x = sem.simulate(spec, theta_star(spec), 2000, 10_000 + rep)
        fit = sem.fit(sem.sample_covariance(x), spec, 2000)
        est.append(fit.estimate_vector())
        ses.append(fit.se_vector())
    ratio = np.std(est, axis=0, ddof=1) / np.mean(ses, axis=0)
    ok = bool(np.all(np.abs(ratio - 1) <= 0.15))
    verdict(7, "empirical SD within 15% of mean SE", ok,
            f"ratios {ratio.min():.3f}..{ratio.max():.3f} over {spec.n_free} parameters")


def test_c08_model_variant_structure():
    spec = {m: sem.build_model(m) for m in (1, 2, 3, 4)}
    x = {m: sem.simulate(spec[m], theta_star(spec[m]), 5000, 80 + m) for m in spec}
    fits = {m: sem.fit(sem.sample_covariance(x[m]), spec[m], 5000) for m in spec}
    rows = {}
    for line in report.render_loadings(fits).splitlines():
        cells = line.split("\t")
        rows.setdefault(cells[0], cells[1:])
    ok = (
        rows["Structural hole"][1] == "" and rows["Structural hole"][3] == ""
        and rows["Investment (total)"][2:] == ["", ""]
        and rows["Investment exited"][2:] == ["", ""]
        and rows["Weighted degree"] == ["1.000"] * 4
        and "structural_hole" not in spec[2].sc_indicators + spec[4].sc_indicators
        and "investment_total" not in spec[3].perf_indicators + spec[4].perf_indicators
        and "investment_exited" not in spec[3].perf_indicators + spec[4].perf_indicators
        and spec[1].p == 10
    )
    blanks_ok = True
    for key, label in report.LABELS.items():
        for m in (1, 2, 3, 4):
            blanks_ok &= (rows[label][m - 1] == "") == (key not in spec[m].indicators)
    verdict(8, "model subsets, blank cells, unstarred fixed 1.000", ok and blanks_ok)


def test_c09_descriptive_statistics():
    rng = np.random.default_rng(9)
    mismatches = 0
    for _ in range(1000):
        col = rng.normal(size=int(rng.integers(1, 200))) * 10 ** rng.uniform(-4, 4)
        x = sorted(col.tolist())
        n = len(x)

        def q(p):
            pos = p * (n - 1)
            lo = math.floor(pos)
            return x[lo] + (x[min(lo + 1, n - 1)] - x[lo]) * (pos - lo)

        mean = math.fsum(x) / n
        sd = math.sqrt(math.fsum((v - mean) ** 2 for v in x) / (n - 1)) if n > 1 else 0.0
        got = perfstats.summarize(col)
        mismatches += (got.mean, got.median, got.std, got.min, got.max, got.q1, got.q3) != (
            mean, q(0.5), sd, x[0], x[-1], q(0.25), q(0.75))
    s = perfstats.summarize([1, 2, 3, 4, 5])
    fixture = s.mean == 3 and s.q1 == 2 and s.q3 == 4 and abs(s.std - math.sqrt(2.5)) < 1e-12
    verdict(9, "describe matches sort oracle exactly", mismatches == 0 and fixture,
            f"{mismatches} mismatching columns of 1000")


def test_c10_scale_performance():
    rng = np.random.default_rng(10)
    n, m = 4000, 20_000
    chosen = set()
    while len(chosen) < m:
        a, b = sorted(rng.integers(n, size=2).tolist())
        if a != b:
            chosen.add((a, b))
    ids = [f"v{i:04d}" for i in range(n)]
    g = network.remove_isolates(
        network.from_edges(ids, [(ids[a], ids[b], int(rng.integers(1, 4))) for a, b in sorted(chosen)])
    )
    start = time.perf_counter()
    suite = metrics.metric_suite(g)
    elapsed = time.perf_counter() - start
    finite = all(np.all(np.isfinite(v.values)) for v in suite.values())
    verdict(10, "metric suite on 4,000 nodes / 20,000 edges", elapsed < 10 and finite,
            f"{elapsed:.2f}s, {g.n} nodes, {g.n_edges} edges, backend {kernels.BACKEND}")


def _tree(root):
    out = {}
    for d, _, files in os.walk(root):
        for f in files:
            p = os.path.join(d, f)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_c11_run_determinism_and_stars(tmp_path):
    data = tmp_path / "data"
    assert cli.main(["synth", "--firms", "150", "--companies", "500", "--seed", "11", "--out", str(data)]) == 0
    for name in ("one", "two"):
        code = cli.main(["run", "--investments", str(data / "investments.csv"), "--exits",
                         str(data / "exits.csv"), "--seed", "11", "--out", str(tmp_path / name)])
        assert code == 0
    identical = _tree(tmp_path / "one") == _tree(tmp_path / "two")
    star_ok = (sem.stars(1.645), sem.stars(1.646), sem.stars(1.96), sem.stars(1.961),
               sem.stars(2.576), sem.stars(2.577), sem.stars(-3.0)) == ("", "*", "*", "**", "**", "***", "***")
    checked = 0
    for m in (1, 2, 3, 4):
        doc = json.loads((tmp_path / "one" / "sem" / f"model_{m}.json").read_text())
        for rec in doc["parameters"]:
            if rec["z"] is not None:
                star_ok &= rec["stars"] == sem.stars(rec["z"])
                checked += 1
            if rec["fixed"]:
                star_ok &= rec["stars"] == ""
    verdict(11, "byte-identical reruns and star thresholds", identical and star_ok,
            f"{len(_tree(tmp_path / 'one'))} files, {checked} starred records checked")
