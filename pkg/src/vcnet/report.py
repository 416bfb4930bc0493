"""Plain-text, tab-delimited renderings of the result tables."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .metrics import SC_COLUMNS
from .perfstats import PERF_COLUMNS, STAT_COLUMNS, Summary
from .sem import SemFit, build_model

LABELS = {
    "weighted_degree": "Weighted degree",
    "closeness": "Closeness",
    "betweenness": "Betweenness",
    "structural_hole": "Structural hole",
    "investment_total": "Investment (total)",
    "ipo_proportion": "IPO proportion",
    "weighted_book_return": "Weighted book return",
    "weighted_irr": "Weighted IRR",
    "investment_exited": "Investment exited",
    "exit_ratio": "Exit ratio",
}

MODE_TITLES = {
    "same-round": "same-round investment",
    "different-round": "different-round investment",
}

STAR_NOTE = "Significance: * |z| > 1.645 (10%), ** |z| > 1.96 (5%), *** |z| > 2.576 (1%)."


def _lines(rows: Sequence[Sequence[str]]) -> str:
    return "".join("\t".join(r) + "\n" for r in rows)


def format_estimate(estimate: float, z: float | None = None, stars: str = "", fixed: bool = False) -> str:
    """``'1.000'`` for a fixed value, else ``'0.567*** (25.089)'``."""
    if fixed:
        return f"{estimate:.3f}"
    if z is None or not math.isfinite(z):
        return f"{estimate:.3f}"
    return f"{estimate:.3f}{stars} ({z:.3f})"


def render_sample_table(rows: Sequence[tuple[str, str]]) -> str:
    return _lines([("Sample selection",), *rows])


def render_descriptive(table: Mapping[str, Summary]) -> str:
    out = [("", *STAT_COLUMNS)]
    for name, s in table.items():
        vals = (s.mean, s.median, s.std, s.min, s.max, s.q1, s.q3)
        out.append((LABELS.get(name, name), *(f"{v:.3f}" for v in vals)))
    return _lines(out)


def _param_cell(fit: SemFit | None, name: str) -> str:
    if fit is None or name not in fit.standard_errors:
        return ""
    idx = fit.spec.param_names().index(name)
    return format_estimate(float(fit.estimate_vector()[idx]), fit.z_values[name], fit.stars[name])


def _loading_cell(fit: SemFit | None, model_id: int, indicator: str) -> str:
    spec = fit.spec if fit is not None else build_model(model_id)
    if indicator not in spec.indicators:
        return ""
    if indicator in (spec.sc_indicators[0], spec.perf_indicators[0]):
        return format_estimate(1.0, fixed=True)
    return _param_cell(fit, f"loading.{indicator}")


def _status(fit: SemFit | None) -> str:
    if fit is None:
        return "not estimable"
    if not fit.converged:
        return "not converged"
    return "converged" if fit.se_status == "OK" else "SE unreliable"


def render_loadings(fits: Mapping[int, SemFit | None], mode: str | None = None) -> str:
    """Loading table; a column per model, blanks where a model drops the row.

    A model whose fit is ``None`` (not estimable) keeps its fixed 1.000
    cells and leaves the estimated cells empty.
    """
    models = sorted(fits)
    out = []
    if mode:
        out.append((f"Latent-variable loadings, {MODE_TITLES.get(mode, mode)}",))
    out.append(("", *(f"Model {m}" for m in models)))
    out.append(("Social capital",))
    for ind in SC_COLUMNS:
        out.append((LABELS[ind], *(_loading_cell(fits[m], m, ind) for m in models)))
    out.append(("Performance",))
    for ind in PERF_COLUMNS:
        out.append((LABELS[ind], *(_loading_cell(fits[m], m, ind) for m in models)))
    out.append(("Estimation", *(_status(fits[m]) for m in models)))
    out.append((STAR_NOTE,))
    return _lines(out)


def render_variances(fits: Mapping[int, SemFit | None], mode: str | None = None) -> str:
    models = sorted(fits)
    out = []
    if mode:
        out.append((f"Latent covariance and variances, {MODE_TITLES.get(mode, mode)}",))
    out.append(("", *(f"Model {m}" for m in models)))
    out.append((
        "Social capital performance",
        *("" if fits[m] is None else f"{fits[m].latent_covariance:.3f}" for m in models),
    ))
    out.append(("Variance",))
    for ind in (*SC_COLUMNS, *PERF_COLUMNS):
        out.append((LABELS[ind], *(_param_cell(fits[m], f"error.{ind}") for m in models)))
    out.append(("Social capital", *(_param_cell(fits[m], "phi") for m in models)))
    out.append(("Performance", *(_param_cell(fits[m], "psi") for m in models)))
    out.append(("Estimation", *(_status(fits[m]) for m in models)))
    out.append((STAR_NOTE,))
    return _lines(out)
