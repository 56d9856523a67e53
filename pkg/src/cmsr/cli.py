"""Command-line entry point: ``cmsr {gen,ingest,recommend,evaluate,simulate,bench}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from datetime import date
from pathlib import Path

from . import evaluate as ev
from .ingest import ClusterSpec, ReadSummary, build_instance, read_traces
from .model import (
    Instance,
    InstanceError,
    load_recommendation,
    outcome_shape,
    save_recommendation,
)
from .recommend import greedy_recommend, lcp_style_recommend, random_recommend, save_trace
from .simulate import RNG_NAME, batch_simulate, mean_report, read_events, simulate
from .single_route import lower_bound, top_k_routes
from .synthetic import DEFAULT_RATES, DEFAULT_TIMES, random_instance

log = logging.getLogger("cmsr")

DEFAULT_STATE_CAP = 10**7
METHOD_LABELS = {
    "gr": "GR",
    "topk": "Top-K",
    "ran": "RAN",
    "lcp": "LCP-style (approximation)",
    "lb": "LB",
}


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _pair(text: str, kind=float) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    try:
        return tuple(kind(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _clock_window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("-")
        secs = []
        for hm in (a, b):
            h, m = hm.split(":")
            secs.append(int(h) * 3600 + int(m) * 60)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like 18:00-18:30, got {text!r}") from None
    return secs[0], secs[1]


def _grid(text: str) -> list[tuple[int, int, int]]:
    cells = []
    for cell in text.split(","):
        try:
            n, k, l = (int(x) for x in cell.lower().split("x"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid cell must be NxKxL, got {cell!r}") from None
        cells.append((n, k, l))
    return cells


def _check_states(rec, cap: int) -> None:
    states = math.prod(outcome_shape(rec))
    if states > cap:
        raise InstanceError(f"{states} outcome states exceed the cap of {cap} (raise --state-cap)")


def cmd_gen(args) -> int:
    if args.l > args.n:
        args.parser.error("route length exceeds point count")
    if args.n < 1 or args.k < 1 or args.l < 1:
        args.parser.error("n, k and l must be positive")
    try:
        inst = random_instance(args.n, args.k, args.l, args.seed, args.rates, args.times)
    except InstanceError as exc:
        args.parser.error(str(exc))
    text = json.dumps(inst.to_dict(), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_ingest(args) -> int:
    summary = ReadSummary()
    records = read_traces(args.traces, summary)
    spec = ClusterSpec(args.eps, args.min_pts, args.window)
    days = None
    if args.days:
        days = [date.fromisoformat(d) for d in args.days]
    inst, sidecar = build_instance(
        records,
        spec,
        start=args.start,
        speed_mps=args.speed,
        route_len=args.route_len,
        fleet=args.fleet,
        days=days,
        penalty=args.penalty,
        utc_offset=args.utc_offset,
    )
    sidecar["rows_read"] = summary.rows
    sidecar["rows_skipped"] = summary.skipped
    inst.save(args.output)
    side_path = args.sidecar or str(Path(args.output).with_suffix(".clusters.json"))
    Path(side_path).write_text(json.dumps(sidecar, indent=2) + "\n")
    print(f"points={inst.n_points} events={sidecar['pickup_events']} skipped_rows={summary.skipped}")
    return 0


def cmd_recommend(args) -> int:
    inst = Instance.load(args.instance)
    if args.method == "ran" and args.seed is None:
        args.parser.error("--seed is required for method ran")
    if args.method == "lb":
        print(f"LB={_fmt(lower_bound(inst))}")
        return 0
    if args.method == "gr":
        if math.prod([inst.route_len + 1] * inst.fleet) > args.state_cap:
            raise InstanceError(f"(L+1)^K exceeds the state cap of {args.state_cap}")
        rec, trace = greedy_recommend(inst, args.engine, threads=args.threads)
        if args.trace:
            save_trace(trace, args.trace)
    elif args.method == "topk":
        rec = top_k_routes(inst)
    elif args.method == "ran":
        rec = random_recommend(inst, args.seed)
    else:
        rec = lcp_style_recommend(inst, args.pool)
    _check_states(rec, args.state_cap)
    if args.output:
        save_recommendation(rec, args.output)
    else:
        print(json.dumps([list(r) for r in rec]))
    print(f"method={METHOD_LABELS[args.method]}")
    print(f"F={_fmt(ev.evaluate_se(rec, inst))}")
    return 0


def cmd_evaluate(args) -> int:
    inst = Instance.load(args.instance)
    rec = load_recommendation(args.recommendation, inst.n_points)
    if len(rec) != inst.fleet:
        log.warning("recommendation has %d routes, instance fleet is %d; evaluating %d", len(rec), inst.fleet, len(rec))
    _check_states(rec, args.state_cap)
    if args.engine == "both":
        sa = ev.evaluate_sa(rec, inst)
        se = ev.evaluate_se(rec, inst)
        rel = abs(se - sa) / abs(sa) if sa else abs(se - sa)
        print(f"F_sa={_fmt(sa)}")
        print(f"F_se={_fmt(se)}")
        print(f"rel_diff={rel:.3e}")
    else:
        print(f"F={_fmt(ev.ENGINES[args.engine](rec, inst))}")
    return 0


def _named_recs(specs, n_points):
    out = {}
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep:
            name, path = Path(spec).stem, spec
        if name in out:
            raise InstanceError(f"duplicate method label {name!r}")
        out[name] = load_recommendation(path, n_points)
    return out


def cmd_simulate(args) -> int:
    inst = Instance.load(args.instance)
    recs = _named_recs(args.recommendations, inst.n_points)
    if args.events:
        streams = [read_events(p) for p in args.events]
        reports = {
            name: mean_report([simulate(rec, inst, s) for s in streams]) for name, rec in recs.items()
        }
    else:
        reports = batch_simulate(recs, inst, args.days, args.horizon, args.seed)
    if args.format == "json":
        payload = {"rng": RNG_NAME, "methods": {n: r.to_dict() for n, r in reports.items()}}
        print(json.dumps(payload, indent=2))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["method", "mean_total_cruise_s", "mean_pickups"])
        for name, r in reports.items():
            w.writerow([name, _fmt(r.total_cruise), _fmt(r.pickups)])
    return 0


def run_bench(cells, seed: int, state_cap: int = DEFAULT_STATE_CAP, threads: int = 1):
    """Greedy with each engine per grid cell; yields BenchRow dicts or skip notes."""
    for n, k, l in cells:
        if (l + 1) ** k > state_cap:
            yield {"N": n, "K": k, "L": l, "skipped": f"(L+1)^K={(l + 1) ** k} exceeds cap {state_cap}"}
            continue
        inst = random_instance(n, k, l, seed)
        for engine in ("se", "sa"):
            t0 = time.perf_counter()
            _, trace = greedy_recommend(inst, engine, threads=threads)
            wall = time.perf_counter() - t0
            yield {"N": n, "K": k, "L": l, "engine": engine.upper(), "wall_seconds": wall, "F": trace[-1].value}


def cmd_bench(args) -> int:
    # compile both kernels before timing anything
    warm = random_instance(2, 2, 1, 0)
    greedy_recommend(warm, "se")
    greedy_recommend(warm, "sa")
    rows = []
    for row in run_bench(args.grid, args.seed, args.state_cap, args.threads):
        if "skipped" in row:
            print(f"# skipped N={row['N']} K={row['K']} L={row['L']}: {row['skipped']}", file=sys.stderr)
            continue
        rows.append(row)
    if args.format == "json":
        print(json.dumps(rows, indent=2))
        return 0
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["N", "K", "L", "engine", "wall_seconds", "F"])
    for r in rows:
        w.writerow([r["N"], r["K"], r["L"], r["engine"], f"{r['wall_seconds']:.4f}", _fmt(r["F"])])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmsr", description="Collective taxi route recommendation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded synthetic instance")
    p.add_argument("--n", type=int, required=True, help="number of pick-up points")
    p.add_argument("--k", type=int, required=True, help="fleet size")
    p.add_argument("--l", type=int, required=True, help="route length")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rates", type=_pair, default=DEFAULT_RATES, metavar="LO,HI", help="arrival rate range, 1/s")
    p.add_argument("--times", type=lambda s: _pair(s, int), default=DEFAULT_TIMES, metavar="LO,HI", help="travel time range, s")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen, parser=p)

    p = sub.add_parser("ingest", help="build an instance from a GPS trace CSV")
    p.add_argument("traces")
    p.add_argument("--start", type=_pair, required=True, metavar="LAT,LON")
    p.add_argument("--speed", type=float, default=25 / 3.6, help="m/s for the travel-time matrix")
    p.add_argument("--eps", type=float, default=200.0, help="DBSCAN radius, meters")
    p.add_argument("--min-pts", type=int, default=5)
    p.add_argument("--window", type=_clock_window, default=(18 * 3600, 18 * 3600 + 1800), metavar="HH:MM-HH:MM")
    p.add_argument("--utc-offset", type=int, default=0, help="seconds added to timestamps before windowing")
    p.add_argument("--days", nargs="*", metavar="YYYY-MM-DD", help="training days for rate fitting")
    p.add_argument("--penalty", type=float, help="defaults to the mean travel time")
    p.add_argument("--route-len", type=int, required=True)
    p.add_argument("--fleet", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sidecar")
    p.set_defaults(func=cmd_ingest, parser=p)

    p = sub.add_parser("recommend", help="build a recommendation")
    p.add_argument("instance")
    p.add_argument("--method", choices=sorted(METHOD_LABELS), required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--engine", choices=("se", "sa"), default="se", help="evaluator used by gr")
    p.add_argument("--pool", type=int, default=5, help="route pool for lcp")
    p.add_argument("--trace", help="write the greedy trace (gr only)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_recommend, parser=p)

    p = sub.add_parser("evaluate", help="compute F for a recommendation")
    p.add_argument("instance")
    p.add_argument("recommendation")
    p.add_argument("--engine", choices=("sa", "se", "both"), default="se")
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.set_defaults(func=cmd_evaluate, parser=p)

    p = sub.add_parser("simulate", help="replay passenger arrivals against recommendations")
    p.add_argument("instance")
    p.add_argument("recommendations", nargs="+", metavar="[NAME=]FILE")
    p.add_argument("--days", type=int, default=24)
    p.add_argument("--horizon", type=float, default=3600.0, help="seconds of synthetic arrivals per day")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--events", nargs="*", help="recorded event CSVs, one per day (replaces synthesis)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate, parser=p)

    p = sub.add_parser("bench", help="greedy wall time with each evaluator")
    p.add_argument("--grid", type=_grid, default=_grid("20x5x5,20x6x5"), metavar="NxKxL[,...]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bench, parser=p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
