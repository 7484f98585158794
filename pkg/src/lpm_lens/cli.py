"""Command line entry point: ``lpm-lens {stats,project,discover,evaluate,export}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .discovery import DiscoveryParams, DiscoveryTimeout, ProjectedRun, discover, discover_with_projections
from .entropy import DEFAULT_ENTROPY_RATIO, discover_entropy_projections
from .evaluation import DEFAULT_KS, TIMING_MODES, EvaluationTimeout, evaluate
from .eventlog import EventLog, LogFormatError, read_log, write_csv
from .family import family_from_json, family_to_json, sort_family
from .markov import MclParams, discover_markov_projections
from .mrig import DEFAULT_MRIG_THRESHOLD, discover_mrig_projections
from .petri import tree_to_dot
from .quality import EQUAL_WEIGHTS, SUPPORT_NORMALIZERS
from .stats import connectedness_matrix, dfr_matrix, dpr_matrix, statistic_entropies, total_entropy
from .tree import parse_tree

logger = logging.getLogger("lpm_lens")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3
METHODS = ("markov", "entropy", "mrig")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for input errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# config file

def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; keys may use dashes or underscores."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    """Config values become parser defaults, so explicit flags still win."""
    known = {a.dest: a for a in sub._actions if a.option_strings}
    found = {}
    for key, value in config.items():
        action = known.get(key)
        if action is None or action.default is argparse.SUPPRESS:
            continue
        if action.nargs == 0:  # store_true
            found[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                found[key] = action.type(value) if action.type else value
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key}: {exc}") from exc
            if action.choices is not None and found[key] not in action.choices:
                raise UsageError(f"config key {key}: {value!r} not in {sorted(action.choices)}")
    sub.set_defaults(**found)


# output helpers

def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary(msg: str) -> None:
    print(msg, file=sys.stderr)


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("LPM_LENS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"LPM_LENS_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _load(args) -> EventLog:
    return read_log(args.log, case_col=args.case_col, activity_col=args.activity_col, time_col=args.time_col)


def _weights(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be comma separated numbers, got {text!r}")


def _ks(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ks must be comma separated integers, got {text!r}")


def _mcl_params(args) -> MclParams:
    return MclParams(inflation=args.inflation, max_iterations=args.max_iter, self_loop=args.self_loop)


def _discovery_params(args) -> DiscoveryParams:
    return DiscoveryParams(top_k=args.top_k, support_prune=args.support_prune,
                           determinism_prune=args.determinism_prune, max_activities=args.max_activities,
                           max_len=args.max_len, weights=args.weights, support_norm=args.support_norm,
                           timeout=getattr(args, "timeout", None))


def _find_projections(args, log: EventLog):
    if args.method == "markov":
        return discover_markov_projections(log, _mcl_params(args))
    if args.method == "entropy":
        return discover_entropy_projections(log, args.entropy_ratio)
    return discover_mrig_projections(log, args.mrig_threshold)


# subcommands

def _order(log: EventLog, order: str) -> list[int]:
    if order == "lexicographic":
        return list(range(len(log.activities)))
    counts = log.activity_counts()
    return sorted(range(len(log.activities)), key=lambda i: (-counts[log.activities[i]], log.activities[i]))


def cmd_stats(args) -> int:
    log = _load(args)
    idx = _order(log, args.order)
    acts = [log.activities[i] for i in idx]
    mats = {"dfr": dfr_matrix(log), "dpr": dpr_matrix(log), "connectedness": connectedness_matrix(log)}
    mats = {k: m[np.ix_(idx, idx)] for k, m in mats.items()}
    if args.format == "json":
        hf, hp = statistic_entropies(log)
        doc = {"activities": acts, "n_traces": log.n_traces, "n_events": log.n_events,
               "entropy": {"total": total_entropy(log),
                           "dfr": {log.activities[i]: float(hf[i]) for i in idx},
                           "dpr": {log.activities[i]: float(hp[i]) for i in idx}}}
        doc.update({k: m.tolist() for k, m in mats.items()})
        text = dump_json(doc)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "from", "to", "value"])
        for name, m in mats.items():
            for i, a in enumerate(acts):
                for j, b in enumerate(acts):
                    w.writerow([name, a, b, repr(float(m[i, j]))])
        text = buf.getvalue()
    _emit(text, args.out)
    _summary(f"{log.n_traces} traces, {log.n_events} events, {len(acts)} activities")
    return EXIT_OK


def cmd_project(args) -> int:
    log = _load(args)
    family = sort_family(_find_projections(args, log))
    _emit(dump_json(family_to_json(family)), args.out)
    _summary(f"{args.method}: {len(family)} projection sets, sizes {[len(q) for q in family]}")
    return EXIT_OK


def cmd_discover(args) -> int:
    log = _load(args)
    params = _discovery_params(args)
    timing: dict = {}
    t0 = time.perf_counter()
    status = EXIT_OK
    partial = False
    try:
        if args.projections:
            with open(args.projections, encoding="utf-8") as fh:
                try:
                    family = family_from_json(json.load(fh))
                except ValueError as exc:
                    raise LogFormatError(f"{args.projections}: {exc}") from exc
            run = ProjectedRun(None, [], [])
            ranking = discover_with_projections(log, family, params, timings=run)
            timing["per_projection_wall"] = run.per_projection_seconds
            timing["per_projection_cpu"] = run.per_projection_cpu
        else:
            ranking = discover(log, params)
    except DiscoveryTimeout as exc:
        ranking, partial, status = exc.partial, True, EXIT_TIMEOUT
        _summary(f"discovery timed out after {params.timeout} s")
        if not args.allow_partial:
            return status
    timing["discover_wall"] = time.perf_counter() - t0
    doc = {"ranking": ranking.to_json(), "partial": partial}
    if args.timing:
        doc["timing"] = timing
    _emit(dump_json(doc), args.out)
    if args.export_dot:
        outdir = Path(args.export_dot)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, m in enumerate(ranking, 1):
            (outdir / f"lpm_{i:02d}.dot").write_text(tree_to_dot(m.tree), encoding="utf-8")
    best = f"; best {ranking[0].key} ({ranking[0].score.weighted_average:.4f})" if ranking else ""
    _summary(f"{len(ranking)} models{best}")
    return status


def cmd_evaluate(args) -> int:
    log = _load(args)
    params = _discovery_params(args)
    if args.method == "markov":
        mp = {"inflation": args.inflation, "max_iterations": args.max_iter, "self_loop": args.self_loop}
    elif args.method == "entropy":
        mp = {"ratio": args.entropy_ratio}
    else:
        mp = {"threshold": args.mrig_threshold}
    try:
        report = evaluate(log, args.method, params, repetitions=args.repetitions, seed=args.seed, ks=args.ks,
                          timing_mode=args.timing_mode, threads=_threads(args.threads), method_params=mp,
                          ground_truth_timeout=args.ground_truth_timeout)
    except EvaluationTimeout as exc:
        _summary(str(exc))
        if args.allow_partial:
            _emit(dump_json(exc.report.to_json()), args.report)
        return EXIT_TIMEOUT
    _emit(dump_json(report.to_json()), args.report)
    if args.csv_row:
        row = report.csv_row()
        path = Path(args.csv_row)
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(row))
            if new:
                w.writeheader()
            w.writerow(row)
    k = report.ks[0]
    base = report.random_baseline.get(f"ndcg@{k}", {})
    _summary(f"{args.method}: {len(report.family)} sets, ndcg@{k} {report.ndcg_at_k[k]:.4f} "
             f"(random {base.get('mean', float('nan')):.4f} ± {base.get('se', float('nan')):.4f}), "
             f"speedup {report.speedup[report.timing_mode]:.2f}x ({report.timing_mode})")
    return EXIT_OK


def cmd_export(args) -> int:
    if args.kind == "dot":
        text = tree_to_dot(parse_tree(args.target))
    else:
        args.log = args.target
        buf = io.StringIO()
        write_csv(_load(args), buf)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


# parser

def _input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("log", help="event log (.csv or .xes)")
    _column_args(p)


def _column_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case-col", default="case")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--time-col", default=None)


def _method_args(p: argparse.ArgumentParser) -> None:
    mcl = MclParams()
    p.add_argument("--inflation", type=float, default=mcl.inflation)
    p.add_argument("--max-iter", type=int, default=mcl.max_iterations)
    p.add_argument("--self-loop", type=float, default=mcl.self_loop,
                   help="lazy-walk weight added to the Markov matrix (default 0)")
    p.add_argument("--entropy-ratio", type=float, default=DEFAULT_ENTROPY_RATIO)
    p.add_argument("--mrig-threshold", type=float, default=DEFAULT_MRIG_THRESHOLD)


def _discovery_args(p: argparse.ArgumentParser) -> None:
    d = DiscoveryParams()
    p.add_argument("--top-k", type=int, default=d.top_k)
    p.add_argument("--support-prune", type=float, default=d.support_prune)
    p.add_argument("--determinism-prune", type=float, default=d.determinism_prune)
    p.add_argument("--max-activities", type=int, default=d.max_activities)
    p.add_argument("--max-len", type=int, default=d.max_len, help="bound on language enumeration")
    p.add_argument("--weights", type=_weights, default=EQUAL_WEIGHTS,
                   help="support,confidence,language_fit,determinism,coverage")
    p.add_argument("--support-norm", choices=SUPPORT_NORMALIZERS, default=d.support_norm)
    p.add_argument("--allow-partial", action="store_true", help="write partial results on timeout")
    # also accepted after the subcommand; SUPPRESS keeps the global value when absent
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker cap (env LPM_LENS_THREADS)")


def build_parser(config: dict[str, str] | None = None) -> argparse.ArgumentParser:
    parser = _Parser(prog="lpm-lens", description="Projection sets and local process model discovery.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="flat key=value file; flags override it")
    parser.add_argument("--threads", type=int, default=None, help="worker cap (env LPM_LENS_THREADS)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("stats", help="dfr, dpr and connectedness matrices")
    _input_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--order", choices=("lexicographic", "frequency"), default="lexicographic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = subs.add_parser("project", help="discover projection sets")
    p.add_argument("method", choices=METHODS)
    _input_args(p)
    _method_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("discover", help="ranked local process models")
    _input_args(p)
    _discovery_args(p)
    p.add_argument("--projections", help="JSON projection family to discover on")
    p.add_argument("--timeout", type=float, default=None, help="seconds")
    p.add_argument("--timing", action="store_true", help="include per-phase timings")
    p.add_argument("--export-dot", metavar="DIR", help="write one Petri net DOT file per model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_discover)

    p = subs.add_parser("evaluate", help="compare a projection method with full discovery")
    _input_args(p)
    p.add_argument("--method", choices=METHODS, required=True)
    _method_args(p)
    _discovery_args(p)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ks", type=_ks, default=DEFAULT_KS)
    p.add_argument("--timing-mode", choices=TIMING_MODES, default="cpu-sum")
    p.add_argument("--ground-truth-timeout", type=float, default=600.0)
    p.add_argument("--report", help="write the report JSON here instead of stdout")
    p.add_argument("--csv-row", help="append a summary CSV row to this file")
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("export", help="tree to DOT, or log to CSV")
    p.add_argument("kind", choices=("dot", "csv"))
    p.add_argument("target", help="process tree text for dot, log path for csv")
    _column_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    if config:
        _apply_config(parser, config)
        for sub in subs.choices.values():
            _apply_config(sub, config)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        config = read_config(known.config) if known.config else None
        parser = build_parser(config)
    except OSError as exc:
        print(f"lpm-lens: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"lpm-lens: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lpm-lens: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LogFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"lpm-lens: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # parameter validation in the library raises ValueError
        print(f"lpm-lens: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
