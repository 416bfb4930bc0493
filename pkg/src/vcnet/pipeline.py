"""End-to-end run: ingest, network, metrics, performance, describe, SEM, tables."""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ingest, metrics, network, perfstats, report, sem
from .errors import SemError, StageError, VCNetError

log = logging.getLogger(__name__)

INDICATOR_COLUMNS = metrics.SC_COLUMNS + perfstats.PERF_COLUMNS
SCALINGS = ("minmax", "none")


@dataclass
class RunConfig:
    investments_path: str
    exits_path: str
    output_dir: str
    mode: str = "same-round"
    models: Sequence[int] = (1, 2, 3, 4)
    seed: int = 0
    scaling: str = "minmax"
    structural_hole_form: str = "constraint"
    both_modes: bool = False

    def validate(self) -> None:
        if not self.models:
            raise ValueError("at least one model is required")
        for m in self.models:
            sem.build_model(int(m))
        if self.scaling not in SCALINGS:
            raise ValueError(f"scaling must be one of {SCALINGS}")
        network.Mode.parse(self.mode)
        metrics.HoleForm.parse(self.structural_hole_form)
        for path in (self.investments_path, self.exits_path):
            if not os.path.isfile(path) or not os.access(path, os.R_OK):
                raise FileNotFoundError(f"cannot read input file: {path}")


@dataclass
class IndicatorMatrix:
    """Sample firms x the ten indicators, plus the scaling applied."""

    vc_ids: list[str]
    columns: dict[str, np.ndarray]
    scaling: str = "none"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# scaling={self.scaling}\n")
            fh.write(",".join(("vc_id", *INDICATOR_COLUMNS)) + "\n")
            for i, vc in enumerate(self.vc_ids):
                fh.write(",".join([vc, *(repr(float(self.columns[c][i])) for c in INDICATOR_COLUMNS)]) + "\n")

    @classmethod
    def read(cls, path) -> "IndicatorMatrix":
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().strip()
            scaling = first.split("=", 1)[1] if first.startswith("# scaling=") else "none"
            header = fh.readline().strip().split(",") if first.startswith("#") else first.split(",")
            ids, vals = [], []
            for line in fh:
                parts = line.rstrip("\n").split(",")
                ids.append(parts[0])
                vals.append([float(x) for x in parts[1:]])
        arr = np.array(vals, dtype=float).reshape(len(ids), len(header) - 1)
        cols = {name: arr[:, k] for k, name in enumerate(header[1:])}
        return cls(ids, cols, scaling)


@dataclass
class ReportBundle:
    sample_table: str
    descriptive_table: str
    loading_tables: dict[str, str] = field(default_factory=dict)
    variance_tables: dict[str, str] = field(default_factory=dict)
    fits: dict[str, dict[int, sem.SemFit | None]] = field(default_factory=dict)


def build_network(log_: ingest.EventLog, mode) -> network.SyndicationGraph:
    return network.remove_isolates(network.project(network.build_bipartite(log_, mode)))


def network_metrics(g: network.SyndicationGraph, form="constraint") -> dict[str, metrics.NodeVector]:
    if g.n >= 3:
        return metrics.metric_suite(g, form)
    # below three nodes no firm can sit between two others
    out = {
        "weighted_degree": metrics.weighted_degree(g),
        "closeness": metrics.closeness(g) if g.n >= 2 else metrics.NodeVector(np.zeros(g.n), "closeness"),
        "betweenness": metrics.NodeVector(np.zeros(g.n), "betweenness"),
        "structural_hole": metrics.structural_hole(g, form),
    }
    return out


def build_indicators(
    g: network.SyndicationGraph,
    suite: dict[str, metrics.NodeVector],
    rows: Sequence[perfstats.PerformanceRow],
    scaling: str = "minmax",
) -> IndicatorMatrix:
    """Join network metrics and performance on firms present in both."""
    pos = {vc: i for i, vc in enumerate(g.nodes)}
    sample = [r for r in rows if r.vc_id in pos]
    idx = np.array([pos[r.vc_id] for r in sample], dtype=np.int64)
    cols: dict[str, np.ndarray] = {}
    for c in metrics.SC_COLUMNS:
        cols[c] = suite[c].values[idx] if len(idx) else np.zeros(0)
    for c in perfstats.PERF_COLUMNS:
        cols[c] = np.array([getattr(r, c) for r in sample], dtype=float)
    if scaling == "minmax" and sample:
        cols = {c: metrics.scale_minmax(metrics.NodeVector(v, c)).values for c, v in cols.items()}
    return IndicatorMatrix([r.vc_id for r in sample], cols, scaling)


def describe_indicators(ind: IndicatorMatrix) -> dict[str, perfstats.Summary]:
    return perfstats.describe({c: ind.columns[c] for c in INDICATOR_COLUMNS})


def fit_models(ind: IndicatorMatrix, models: Sequence[int]) -> tuple[dict[int, sem.SemFit | None], dict[int, str]]:
    """Fit each model; data too thin to estimate yields ``None`` plus a reason."""
    fits: dict[int, sem.SemFit | None] = {}
    reasons: dict[int, str] = {}
    for m in sorted(set(int(x) for x in models)):
        spec = sem.build_model(m)
        x = sem.indicator_matrix(ind.columns, spec)
        try:
            S = sem.sample_covariance(x)
            fit = sem.fit(S, spec, x.shape[0])
        except SemError as exc:
            log.warning("model %d not estimable: %s", m, exc)
            fits[m] = None
            reasons[m] = str(exc)
            continue
        if not fit.converged:
            log.warning("model %d did not converge: %s", m, fit.message)
        fits[m] = fit
    return fits, reasons


def _fit_document(fit: sem.SemFit | None, model_id: int, mode: str, reason: str | None) -> str:
    if fit is None:
        doc = {"model": {"model_id": model_id, "mode": mode, "estimable": False, "reason": reason}, "parameters": []}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    fit.metadata.update({"mode": mode, "estimable": True})
    return fit.to_json()


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except (VCNetError, ValueError, OSError, KeyError) as exc:
        raise StageError(name, exc) from exc


def _run_mode(cfg: RunConfig, log_: ingest.EventLog, mode: str, out: str, bundle: ReportBundle) -> None:
    os.makedirs(out, exist_ok=True)
    g = _stage("network", build_network, log_, mode)
    g.write_edgelist(os.path.join(out, "edges.csv"))
    suite = _stage("metrics", network_metrics, g, cfg.structural_hole_form)
    metrics.write_metric_table(os.path.join(out, "metrics.csv"), g, suite)

    rows, excluded = _stage("perf", perfstats.performance_indicators, log_, g.nodes)
    perfstats.write_performance_table(os.path.join(out, "performance.csv"), rows)
    ind = _stage("indicators", build_indicators, g, suite, rows, cfg.scaling)
    ind.write(os.path.join(out, "indicators.csv"))

    sample = ingest.sample_report(log_, network_firms=g.n)
    sample.append(("Firms in estimation sample", f"{len(ind.vc_ids):,}"))
    sample_text = report.render_sample_table(sample)
    _write(os.path.join(out, "sample.txt"), sample_text)

    table = _stage("describe", describe_indicators, ind)
    desc_text = report.render_descriptive(table)
    _write(os.path.join(out, "descriptive.txt"), desc_text)

    fits, reasons = _stage("sem", fit_models, ind, cfg.models)
    for m, fit in fits.items():
        _write(os.path.join(out, "sem", f"model_{m}.json"), _fit_document(fit, m, mode, reasons.get(m)))
    load_text = report.render_loadings(fits, mode)
    var_text = report.render_variances(fits, mode)
    _write(os.path.join(out, "loadings.txt"), load_text)
    _write(os.path.join(out, "variances.txt"), var_text)

    bundle.sample_table = bundle.sample_table or sample_text
    bundle.descriptive_table = bundle.descriptive_table or desc_text
    bundle.loading_tables[mode] = load_text
    bundle.variance_tables[mode] = var_text
    bundle.fits[mode] = fits
    meta = {
        "mode": mode,
        "network_nodes": g.n,
        "network_edges": g.n_edges,
        "excluded_firms": dict(sorted(excluded.items())),
        "sample_firms": len(ind.vc_ids),
    }
    _write(os.path.join(out, "summary.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def run_pipeline(cfg: RunConfig) -> ReportBundle:
    """Run every stage and write all exports under ``cfg.output_dir``.

    Outputs are staged in a temporary sibling directory and copied over only
    on success, so a failed run leaves nothing behind.
    """
    cfg.validate()
    parent = os.path.dirname(os.path.abspath(cfg.output_dir)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".vcnet-", dir=parent)
    try:
        log_ = _stage("ingest", ingest.load_event_log, cfg.investments_path, cfg.exits_path)
        log_.write(os.path.join(tmp, "events"))
        _write(
            os.path.join(tmp, "rejections.json"),
            json.dumps(dict(log_.rejected_counts), indent=2, sort_keys=True) + "\n",
        )
        bundle = ReportBundle("", "")
        modes = [m.value for m in network.Mode] if cfg.both_modes else [network.Mode.parse(cfg.mode).value]
        for mode in modes:
            out = os.path.join(tmp, mode) if cfg.both_modes else tmp
            _run_mode(cfg, log_, mode, out, bundle)
        run_meta = {
            "investments": cfg.investments_path,
            "exits": cfg.exits_path,
            "modes": modes,
            "models": sorted(int(m) for m in cfg.models),
            "seed": cfg.seed,
            "scaling": cfg.scaling,
            "structural_hole_form": metrics.HoleForm.parse(cfg.structural_hole_form).value,
        }
        _write(os.path.join(tmp, "run.json"), json.dumps(run_meta, indent=2, sort_keys=True) + "\n")
        shutil.copytree(tmp, cfg.output_dir, dirs_exist_ok=True)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return bundle
