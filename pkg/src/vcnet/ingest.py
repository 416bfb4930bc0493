"""Parsing and validation of investment / exit event files.

Both inputs are UTF-8 comma-delimited text with a header row::

    investments: vc_id,company_id,round_id,date,amount
    exits:       vc_id,company_id,exit_type,exit_amount,book_return,irr,date

Malformed rows are never fatal; they are dropped and tallied by reason.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

INVESTMENT_COLUMNS = ("vc_id", "company_id", "round_id", "date", "amount")
EXIT_COLUMNS = ("vc_id", "company_id", "exit_type", "exit_amount", "book_return", "irr", "date")

# rejection reasons
MISSING_FIELD = "MISSING_FIELD"
FIELD_COUNT = "FIELD_COUNT"
BAD_DATE = "BAD_DATE"
BAD_NUMBER = "BAD_NUMBER"
NEGATIVE_AMOUNT = "NEGATIVE_AMOUNT"
NEGATIVE_BOOK_RETURN = "NEGATIVE_BOOK_RETURN"
DUPLICATE_MERGED = "DUPLICATE_MERGED"
ORPHAN_EXIT = "ORPHAN_EXIT"


class ExitType(str, enum.Enum):
    IPO = "IPO"
    MA = "MA"
    BUYBACK = "BUYBACK"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, label: str) -> "ExitType":
        # "M&A", "m & a" and "buy-back" normalise to the enum values
        key = "".join(ch for ch in label.upper() if ch.isalnum())
        try:
            return cls(key)
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True, order=True)
class InvestmentEvent:
    vc_id: str
    company_id: str
    round_id: str
    date: dt.date
    amount: float


@dataclass(frozen=True, order=True)
class ExitEvent:
    vc_id: str
    company_id: str
    exit_type: ExitType
    exit_amount: float
    book_return: float
    irr: float
    date: dt.date


@dataclass
class ParseResult:
    """Events parsed from one file plus per-reason rejection tallies."""

    events: list
    rejected: Counter = field(default_factory=Counter)
    raw_rows: int = 0


@dataclass(frozen=True)
class EventLog:
    investments: tuple[InvestmentEvent, ...]
    exits: tuple[ExitEvent, ...]
    firms: frozenset[str]
    companies: frozenset[str]
    rejected_counts: Mapping[str, int]
    raw_rows: int

    @property
    def retained_rows(self) -> int:
        return len(self.investments) + len(self.exits)

    def write(self, directory: str | os.PathLike) -> tuple[str, str]:
        """Write the log back out in the two input schemas."""
        os.makedirs(directory, exist_ok=True)
        inv_path = os.path.join(directory, "investments.csv")
        exit_path = os.path.join(directory, "exits.csv")
        with open(inv_path, "w", encoding="utf-8", newline="") as fh:
            write_investments(self.investments, fh)
        with open(exit_path, "w", encoding="utf-8", newline="") as fh:
            write_exits(self.exits, fh)
        return inv_path, exit_path


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def _parse_float(text: str) -> float:
    value = float(text.strip())
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError("non-finite")
    return value


def _rows(source: TextIO, schema: Mapping[str, str] | None, columns: Sequence[str]):
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        return
    schema = dict(schema or {})
    header = [h.strip() for h in reader.fieldnames]
    reader.fieldnames = header
    for col in columns:
        src = schema.get(col, col)
        if src not in header:
            raise ValueError(f"missing column '{src}' in header {header}")
    width = len(header)
    for row in reader:
        # DictReader files surplus cells under None and fills short rows with None
        if None in row or sum(v is not None for v in row.values()) != width:
            yield None
            continue
        yield {col: row[schema.get(col, col)].strip() for col in columns}


def _open(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8", newline="")
    return source


def parse_investments(source, schema: Mapping[str, str] | None = None) -> ParseResult:
    """Parse an investments stream or path.

    ``schema`` maps canonical column names to the header names used in the
    file; absent keys default to the canonical name.
    """
    fh = _open(source)
    out = ParseResult(events=[])
    try:
        for row in _rows(fh, schema, INVESTMENT_COLUMNS):
            out.raw_rows += 1
            if row is None:
                out.rejected[FIELD_COUNT] += 1
                continue
            if not (row["vc_id"] and row["company_id"] and row["round_id"]):
                out.rejected[MISSING_FIELD] += 1
                continue
            try:
                date = _parse_date(row["date"])
            except ValueError:
                out.rejected[BAD_DATE] += 1
                continue
            try:
                amount = _parse_float(row["amount"])
            except ValueError:
                out.rejected[BAD_NUMBER] += 1
                continue
            if amount < 0:
                out.rejected[NEGATIVE_AMOUNT] += 1
                continue
            out.events.append(
                InvestmentEvent(row["vc_id"], row["company_id"], row["round_id"], date, amount)
            )
    finally:
        if fh is not source:
            fh.close()
    return out


def parse_exits(source, schema: Mapping[str, str] | None = None) -> ParseResult:
    """Parse an exits stream or path; unknown exit labels map to OTHER."""
    fh = _open(source)
    out = ParseResult(events=[])
    try:
        for row in _rows(fh, schema, EXIT_COLUMNS):
            out.raw_rows += 1
            if row is None:
                out.rejected[FIELD_COUNT] += 1
                continue
            if not (row["vc_id"] and row["company_id"]):
                out.rejected[MISSING_FIELD] += 1
                continue
            try:
                date = _parse_date(row["date"])
            except ValueError:
                out.rejected[BAD_DATE] += 1
                continue
            try:
                exit_amount = _parse_float(row["exit_amount"])
                book_return = _parse_float(row["book_return"])
                irr = _parse_float(row["irr"])
            except ValueError:
                out.rejected[BAD_NUMBER] += 1
                continue
            if exit_amount < 0:
                out.rejected[NEGATIVE_AMOUNT] += 1
                continue
            if book_return < 0:
                out.rejected[NEGATIVE_BOOK_RETURN] += 1
                continue
            out.events.append(
                ExitEvent(
                    row["vc_id"],
                    row["company_id"],
                    ExitType.parse(row["exit_type"]),
                    exit_amount,
                    book_return,
                    irr,
                    date,
                )
            )
    finally:
        if fh is not source:
            fh.close()
    return out


def _unpack(parsed) -> tuple[list, Counter, int]:
    if isinstance(parsed, ParseResult):
        return list(parsed.events), Counter(parsed.rejected), parsed.raw_rows
    events = list(parsed)
    return events, Counter(), len(events)


def build_event_log(investments, exits) -> EventLog:
    """Deduplicate, cross-link and register parsed events.

    Accepts either :class:`ParseResult` objects or plain event sequences.
    Duplicate ``(vc_id, company_id, round_id)`` investments are merged by
    summing amounts (earliest date kept); exits without a matching
    ``(vc_id, company_id)`` investment are dropped as orphans.
    """
    inv_events, rejected, raw_inv = _unpack(investments)
    exit_events, exit_rejected, raw_exit = _unpack(exits)
    rejected.update(exit_rejected)

    groups: dict[tuple[str, str, str], list[InvestmentEvent]] = {}
    for ev in inv_events:
        groups.setdefault((ev.vc_id, ev.company_id, ev.round_id), []).append(ev)
    merged = []
    for key, evs in groups.items():
        rejected[DUPLICATE_MERGED] += len(evs) - 1
        # fsum keeps tranche totals independent of row order
        merged.append(InvestmentEvent(*key, min(e.date for e in evs), math.fsum(e.amount for e in evs)))
    invs = tuple(sorted(merged))

    pairs = {(ev.vc_id, ev.company_id) for ev in invs}
    kept = []
    for ev in exit_events:
        if (ev.vc_id, ev.company_id) in pairs:
            kept.append(ev)
        else:
            rejected[ORPHAN_EXIT] += 1
    exits_t = tuple(sorted(kept))

    return EventLog(
        investments=invs,
        exits=exits_t,
        firms=frozenset(ev.vc_id for ev in invs),
        companies=frozenset(ev.company_id for ev in invs),
        rejected_counts={k: v for k, v in sorted(rejected.items()) if v},
        raw_rows=raw_inv + raw_exit,
    )


def load_event_log(investments_path, exits_path) -> EventLog:
    for path in (investments_path, exits_path):
        if not os.path.isfile(path):
            raise FileNotFoundError(f"cannot read input file: {path}")
    return build_event_log(parse_investments(investments_path), parse_exits(exits_path))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_investments(events: Iterable[InvestmentEvent], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(INVESTMENT_COLUMNS)
    for ev in events:
        w.writerow([ev.vc_id, ev.company_id, ev.round_id, ev.date.isoformat(), _fmt(ev.amount)])


def write_exits(events: Iterable[ExitEvent], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(EXIT_COLUMNS)
    for ev in events:
        w.writerow([
            ev.vc_id,
            ev.company_id,
            ev.exit_type.value,
            _fmt(ev.exit_amount),
            _fmt(ev.book_return),
            _fmt(ev.irr),
            ev.date.isoformat(),
        ])


def sample_report(log: EventLog, network_firms: int | None = None) -> list[tuple[str, str]]:
    """Rows of the sample-accounting table."""
    dates = [ev.date for ev in log.investments] + [ev.date for ev in log.exits]
    period = f"{min(dates).year} to {max(dates).year}" if dates else ""
    rows = [
        ("Sample period", period),
        ("VC firms", f"{len(log.firms):,}"),
        ("Enterprises with VC investment", f"{len(log.companies):,}"),
        ("Investment events", f"{len(log.investments):,}"),
    ]
    if network_firms is not None:
        rows.append(("VC firms in joint investment networks", f"{network_firms:,}"))
    rows.append(("Disclosed exit events", f"{len(log.exits):,}"))
    return rows


def investments_from_text(text: str) -> ParseResult:
    return parse_investments(io.StringIO(text))


def exits_from_text(text: str) -> ParseResult:
    return parse_exits(io.StringIO(text))
