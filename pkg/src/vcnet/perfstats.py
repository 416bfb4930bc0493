"""Per-firm financial performance indicators and descriptive statistics."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, astuple
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import StatsError
from .ingest import EventLog, ExitType

PERF_COLUMNS = (
    "investment_total",
    "ipo_proportion",
    "weighted_book_return",
    "weighted_irr",
    "investment_exited",
    "exit_ratio",
)

NO_EXITS = "NO_EXITS"

STAT_COLUMNS = ("Mean", "Median", "Std. dev.", "Min", "Max", "Q1", "Q3")


@dataclass(frozen=True)
class PerformanceRow:
    vc_id: str
    investment_total: float
    ipo_proportion: float
    weighted_book_return: float
    weighted_irr: float
    investment_exited: float
    exit_ratio: float


def _wmean(values: Sequence[float], weights: Sequence[float]) -> float:
    total = math.fsum(weights)
    if total <= 0:
        # zero principal: fall back to an unweighted mean
        return math.fsum(values) / len(values)
    return math.fsum(v * w for v, w in zip(values, weights)) / total


def performance_indicators(
    log: EventLog, firms: Iterable[str] | None = None
) -> tuple[list[PerformanceRow], Counter]:
    """Compute the six indicators for each firm that has at least one exit.

    Exits link to invested principal by ``(vc_id, company_id)``.  Several
    exits of one pair sum their proceeds, and their book returns / IRRs are
    combined weighted by the principal each exit covers (equal shares).

    Returns the rows sorted by ``vc_id`` and a tally of excluded firms.
    """
    firms = sorted(log.firms if firms is None else set(firms))
    principal: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for ev in log.investments:
        principal[ev.vc_id][ev.company_id].append(ev.amount)
    exits: dict[str, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    for ev in log.exits:
        exits[ev.vc_id][ev.company_id].append(ev)

    rows, excluded = [], Counter()
    for vc in firms:
        if not exits.get(vc):
            excluded[NO_EXITS] += 1
            continue
        invested = {c: math.fsum(sorted(a)) for c, a in principal[vc].items()}
        total = math.fsum(sorted(invested.values()))
        positions = sorted(exits[vc])
        pos_principal, pos_book, pos_irr = [], [], []
        ipo_amount, exit_amount = [], []
        for c in positions:
            evs = sorted(exits[vc][c])
            p = invested[c]
            pos_principal.append(p)
            # within-pair mean: each exit carries an equal share of the principal
            pos_book.append(math.fsum(e.book_return for e in evs) / len(evs))
            pos_irr.append(math.fsum(e.irr for e in evs) / len(evs))
            for e in evs:
                exit_amount.append(e.exit_amount)
                if e.exit_type is ExitType.IPO:
                    ipo_amount.append(e.exit_amount)
        exited = math.fsum(pos_principal)
        all_exit = math.fsum(exit_amount)
        rows.append(
            PerformanceRow(
                vc_id=vc,
                investment_total=total,
                ipo_proportion=math.fsum(ipo_amount) / all_exit if all_exit > 0 else 0.0,
                weighted_book_return=_wmean(pos_book, pos_principal),
                weighted_irr=_wmean(pos_irr, pos_principal),
                investment_exited=exited,
                exit_ratio=exited / total if total > 0 else 0.0,
            )
        )
    return rows, excluded


def write_performance_table(path, rows: Sequence[PerformanceRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(("vc_id", *PERF_COLUMNS)) + "\n")
        for r in rows:
            vals = astuple(r)
            fh.write(",".join([vals[0], *(repr(float(v)) for v in vals[1:])]) + "\n")


def read_performance_table(path) -> list[PerformanceRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append(PerformanceRow(parts[0], *(float(x) for x in parts[1:])))
    return rows


def quantile(sorted_x: np.ndarray, p: float) -> float:
    """Linear interpolation at zero-based position ``p * (n - 1)``."""
    pos = p * (len(sorted_x) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(sorted_x) - 1)
    frac = pos - lo
    return float(sorted_x[lo] + (sorted_x[hi] - sorted_x[lo]) * frac)


@dataclass(frozen=True)
class Summary:
    mean: float
    median: float
    std: float
    min: float
    max: float
    q1: float
    q3: float


def summarize(values) -> Summary:
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if n == 0:
        raise StatsError("EMPTY_COLUMN", "cannot describe an empty column")
    mean = math.fsum(x) / n
    std = math.sqrt(math.fsum((x - mean) ** 2) / (n - 1)) if n > 1 else 0.0
    return Summary(
        mean=mean,
        median=quantile(x, 0.5),
        std=std,
        min=float(x[0]),
        max=float(x[-1]),
        q1=quantile(x, 0.25),
        q3=quantile(x, 0.75),
    )


def describe(columns: Mapping[str, Sequence[float]]) -> dict[str, Summary]:
    """Descriptive statistics per named column, in the given column order.

    Standard deviation uses the ``n - 1`` divisor (0 for a single value).
    """
    return {name: summarize(col) for name, col in columns.items()}
