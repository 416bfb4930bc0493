"""Command-line entry point: ``vcnet <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import ingest, metrics, network, perfstats, pipeline, report, synth
from .errors import VCNetError

log = logging.getLogger("vcnet")


def _models(text: str) -> list[int]:
    try:
        models = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad model list {text!r}") from None
    if not models or any(m not in (1, 2, 3, 4) for m in models):
        raise argparse.ArgumentTypeError("models must be drawn from 1,2,3,4")
    return models


def _add_inputs(p, required=True):
    p.add_argument("--investments", required=required, help="investments CSV")
    p.add_argument("--exits", required=required, help="exits CSV")


def _add_common(p):
    p.add_argument("--mode", default="same-round", choices=["same-round", "different-round"])
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sh-form", default="constraint", choices=["constraint", "complement"])
    p.add_argument("--scaling", default="minmax", choices=["minmax", "none"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcnet", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate inputs, write cleaned event files")
    _add_inputs(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("network", help="project to the syndication network (edge list)")
    _add_inputs(p)
    _add_common(p)

    p = sub.add_parser("metrics", help="social-capital indicators")
    _add_inputs(p, required=False)
    p.add_argument("--edges", help="edge list from `network` instead of raw inputs")
    _add_common(p)

    p = sub.add_parser("perf", help="per-firm performance indicators")
    _add_inputs(p)
    _add_common(p)

    p = sub.add_parser("describe", help="descriptive statistics of the indicator matrix")
    _add_inputs(p, required=False)
    p.add_argument("--indicators", help="indicators.csv from `run` instead of raw inputs")
    _add_common(p)

    p = sub.add_parser("sem", help="fit Models 1-4")
    _add_inputs(p, required=False)
    p.add_argument("--indicators", help="indicators.csv from `run` instead of raw inputs")
    p.add_argument("--model", type=_models, default=[1, 2, 3, 4])
    _add_common(p)

    p = sub.add_parser("synth", help="write a synthetic investments/exits pair")
    p.add_argument("--firms", type=int, default=200)
    p.add_argument("--companies", type=int, default=600)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--syndication-rate", type=float, default=0.6)
    p.add_argument("--exit-rate", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="full pipeline")
    _add_inputs(p)
    _add_common(p)
    p.add_argument("--model", type=_models, default=[1, 2, 3, 4])
    p.add_argument("--both-modes", action="store_true", help="run same- and different-round")
    return parser


def _write(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _indicators_from_args(args) -> pipeline.IndicatorMatrix:
    if args.indicators:
        return pipeline.IndicatorMatrix.read(args.indicators)
    if not (args.investments and args.exits):
        raise ValueError("give --indicators or both --investments and --exits")
    log_ = ingest.load_event_log(args.investments, args.exits)
    g = pipeline.build_network(log_, args.mode)
    suite = pipeline.network_metrics(g, args.sh_form)
    rows, _ = perfstats.performance_indicators(log_, g.nodes)
    return pipeline.build_indicators(g, suite, rows, args.scaling)


def _cmd_ingest(args):
    log_ = ingest.load_event_log(args.investments, args.exits)
    log_.write(args.out)
    _write(os.path.join(args.out, "sample.txt"), report.render_sample_table(ingest.sample_report(log_)))
    _write(
        os.path.join(args.out, "rejections.json"),
        json.dumps(dict(log_.rejected_counts), indent=2, sort_keys=True) + "\n",
    )


def _cmd_network(args):
    log_ = ingest.load_event_log(args.investments, args.exits)
    g = pipeline.build_network(log_, args.mode)
    os.makedirs(args.out, exist_ok=True)
    g.write_edgelist(os.path.join(args.out, "edges.csv"))
    print(f"{g.n} firms, {g.n_edges} edges, {len(network.components(g))} components")


def _cmd_metrics(args):
    if args.edges:
        g = network.read_edgelist(args.edges, mode=network.Mode.parse(args.mode))
    else:
        if not (args.investments and args.exits):
            raise ValueError("give --edges or both --investments and --exits")
        g = pipeline.build_network(ingest.load_event_log(args.investments, args.exits), args.mode)
    suite = pipeline.network_metrics(g, args.sh_form)
    os.makedirs(args.out, exist_ok=True)
    metrics.write_metric_table(os.path.join(args.out, "metrics.csv"), g, suite)


def _cmd_perf(args):
    log_ = ingest.load_event_log(args.investments, args.exits)
    g = pipeline.build_network(log_, args.mode)
    rows, _ = perfstats.performance_indicators(log_, g.nodes)
    os.makedirs(args.out, exist_ok=True)
    perfstats.write_performance_table(os.path.join(args.out, "performance.csv"), rows)


def _cmd_describe(args):
    ind = _indicators_from_args(args)
    _write(os.path.join(args.out, "descriptive.txt"), report.render_descriptive(pipeline.describe_indicators(ind)))


def _cmd_sem(args):
    ind = _indicators_from_args(args)
    fits, reasons = pipeline.fit_models(ind, args.model)
    for m, fit in fits.items():
        _write(
            os.path.join(args.out, "sem", f"model_{m}.json"),
            pipeline._fit_document(fit, m, args.mode, reasons.get(m)),
        )
    _write(os.path.join(args.out, "loadings.txt"), report.render_loadings(fits, args.mode))
    _write(os.path.join(args.out, "variances.txt"), report.render_variances(fits, args.mode))


def _cmd_synth(args):
    paths = synth.generate_synthetic_eventlog(
        args.firms, args.companies, args.rounds, args.syndication_rate, args.exit_rate, args.seed, args.out
    )
    print("\n".join(paths))


def _cmd_run(args):
    cfg = pipeline.RunConfig(
        investments_path=args.investments,
        exits_path=args.exits,
        output_dir=args.out,
        mode=args.mode,
        models=args.model,
        seed=args.seed,
        scaling=args.scaling,
        structural_hole_form=args.sh_form,
        both_modes=args.both_modes,
    )
    bundle = pipeline.run_pipeline(cfg)
    for mode, text in bundle.loading_tables.items():
        print(text)


COMMANDS = {
    "ingest": _cmd_ingest,
    "network": _cmd_network,
    "metrics": _cmd_metrics,
    "perf": _cmd_perf,
    "describe": _cmd_describe,
    "sem": _cmd_sem,
    "synth": _cmd_synth,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except (VCNetError, OSError, ValueError) as exc:
        print(f"vcnet {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
