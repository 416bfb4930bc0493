"""Seeded synthetic investment / exit logs in the ingest file schemas."""

from __future__ import annotations

import datetime as dt
import os

import numpy as np

from .ingest import ExitEvent, ExitType, InvestmentEvent, write_exits, write_investments

_EXIT_TYPES = (ExitType.IPO, ExitType.MA, ExitType.BUYBACK, ExitType.OTHER)
_EXIT_PROBS = (0.5, 0.3, 0.1, 0.1)


def synthesize(
    firms: int,
    companies: int,
    rounds_per_company: int,
    syndication_rate: float,
    exit_rate: float,
    seed: int,
) -> tuple[list[InvestmentEvent], list[ExitEvent]]:
    """Draw a synthetic event log.

    Every company has ``rounds_per_company`` rounds and one lead firm that
    invests in each of them.  With probability ``syndication_rate`` a round
    also gets ``1 + Poisson(1)`` co-investors, drawn by heavy-tailed firm
    activity.  Leads cycle through a permutation of all firms first, so
    every firm invests whenever ``firms <= companies``; leftover firms join
    random syndicated rounds.  A company exits with probability
    ``exit_rate``, producing one exit per investing firm.  A latent firm
    quality (standardised log activity) raises the lead's IPO odds and the
    firm's book return, so network position and performance co-vary.
    """
    if min(firms, companies, rounds_per_company) < 1:
        raise ValueError("firm, company and round counts must be positive")
    for rate in (syndication_rate, exit_rate):
        if not 0.0 <= rate <= 1.0:
            raise ValueError("rates must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    fw = len(str(firms))
    cw = len(str(companies))
    firm_ids = [f"VC{i:0{fw}d}" for i in range(1, firms + 1)]
    comp_ids = [f"C{i:0{cw}d}" for i in range(1, companies + 1)]

    activity = rng.pareto(1.5, firms) + 1.0
    # firm quality: standardised log-activity; drives IPO odds and returns
    quality = np.log(activity)
    quality = (quality - quality.mean()) / (quality.std() or 1.0)
    activity /= activity.sum()

    perm = rng.permutation(firms)
    leads = np.empty(companies, dtype=np.int64)
    head = min(firms, companies)
    leads[:head] = perm[:head]
    if companies > head:
        leads[head:] = rng.choice(firms, size=companies - head, p=activity)

    # rounds[c][r] = list of firm indices
    rounds: list[list[list[int]]] = []
    syndicated: list[tuple[int, int]] = []
    used = np.zeros(firms, dtype=bool)
    for c in range(companies):
        lead = int(leads[c])
        used[lead] = True
        comp_rounds = []
        for r in range(rounds_per_company):
            members = [lead]
            if firms > 1 and rng.random() < syndication_rate:
                k = min(1 + int(rng.poisson(1.0)), firms - 1)
                p = activity.copy()
                p[lead] = 0.0
                p /= p.sum()
                extra = rng.choice(firms, size=k, replace=False, p=p)
                members.extend(int(e) for e in extra)
                used[extra] = True
                syndicated.append((c, r))
            comp_rounds.append(members)
        rounds.append(comp_rounds)
    if syndicated:
        for f in np.flatnonzero(~used):
            c, r = syndicated[int(rng.integers(len(syndicated)))]
            if int(f) not in rounds[c][r]:
                rounds[c][r].append(int(f))

    investments: list[InvestmentEvent] = []
    exits: list[ExitEvent] = []
    for c, comp_rounds in enumerate(rounds):
        start = dt.date(2000, 1, 1) + dt.timedelta(days=int(rng.integers(0, 12 * 365)))
        day = start
        principal: dict[int, float] = {}
        for r, members in enumerate(comp_rounds):
            if r:
                day = day + dt.timedelta(days=int(rng.integers(180, 540)))
            for f in sorted(members):
                amount = round(float(rng.lognormal(np.log(2e6), 1.0)), 2)
                investments.append(
                    InvestmentEvent(firm_ids[f], comp_ids[c], f"R{r + 1}", day, amount)
                )
                principal[f] = principal.get(f, 0.0) + amount
        if rng.random() < exit_rate:
            p_ipo = float(np.clip(_EXIT_PROBS[0] + 0.15 * quality[leads[c]], 0.05, 0.95))
            rest = np.array(_EXIT_PROBS[1:]) / sum(_EXIT_PROBS[1:]) * (1.0 - p_ipo)
            etype = _EXIT_TYPES[int(rng.choice(len(_EXIT_TYPES), p=[p_ipo, *rest]))]
            exit_day = day + dt.timedelta(days=int(rng.integers(365, 5 * 365)))
            years = max((exit_day - start).days / 365.25, 0.5)
            for f in sorted(principal):
                book = round(float(rng.lognormal(0.3 + 0.3 * quality[f], 0.6)), 4)
                irr = round(book ** (1.0 / years) - 1.0, 6)
                exits.append(
                    ExitEvent(
                        firm_ids[f],
                        comp_ids[c],
                        etype,
                        round(principal[f] * book, 2),
                        book,
                        irr,
                        exit_day,
                    )
                )
    return investments, exits


def generate_synthetic_eventlog(
    firms: int,
    companies: int,
    rounds_per_company: int,
    syndication_rate: float,
    exit_rate: float,
    seed: int,
    directory,
) -> tuple[str, str]:
    """Write ``investments.csv`` and ``exits.csv`` into ``directory``."""
    investments, exits = synthesize(
        firms, companies, rounds_per_company, syndication_rate, exit_rate, seed
    )
    os.makedirs(directory, exist_ok=True)
    inv_path = os.path.join(directory, "investments.csv")
    exit_path = os.path.join(directory, "exits.csv")
    with open(inv_path, "w", encoding="utf-8", newline="") as fh:
        write_investments(investments, fh)
    with open(exit_path, "w", encoding="utf-8", newline="") as fh:
        write_exits(exits, fh)
    return inv_path, exit_path
