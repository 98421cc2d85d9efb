"""Command-line interface.

Subcommands: solve, frontier, generate, reduce-knapsack, bench, serve.
Market JSON comes from a file or stdin ("-").  Exit codes: 0 success,
1 invalid input, 2 solver refusal (caps or algorithm/instance mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, bench
from .heterogeneous import SaParams
from .homogeneous import greedy_optimal
from .instances import (
    GeneratorConfig,
    RawMarket,
    SchemaViolation,
    generate_market,
    knapsack_to_market,
    read_knapsack,
    read_market,
    write_market,
)
from .market import MarketError, SolverRefusal, TrivialInstance
from .solve import (
    DEFAULT_EPSILON,
    auto_algorithm,
    frontier_document,
    has_integer_costs,
    report_document,
    solve_market,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_REFUSED = 2


def _read_raw(path: str) -> RawMarket:
    if path == "-":
        return read_market(sys.stdin.read())
    return read_market(path)


def _fmt_value(x: float, human: bool) -> str:
    return f"{x:.6g}" if human else repr(x)


def cmd_solve(args) -> int:
    raw = _read_raw(args.market)
    try:
        market = raw.to_market()
    except TrivialInstance:
        out = {
            "solver": args.algorithm,
            "certificate": "exact",
            "members": [],
            "schools": [],
            "value": raw.t0,
            "canonical_value": 0.0,
        }
        _emit_report(out, args)
        return EXIT_OK
    algorithm = args.algorithm
    if algorithm == "auto":
        algorithm = auto_algorithm(market)
    if algorithm == "dp" and not has_integer_costs(market):
        print(
            "error: dp requires integer costs and budget; use --algorithm fptas",
            file=sys.stderr,
        )
        return EXIT_REFUSED
    if algorithm == "greedy" and not market.unit_costs:
        print(
            "error: greedy requires unit costs; use bnb, dp, fptas, or sa",
            file=sys.stderr,
        )
        return EXIT_REFUSED
    sa = SaParams(
        temperature=args.sa_T, cooling=args.sa_r, iterations=args.sa_N, seed=args.seed
    )
    report = solve_market(
        market, algorithm, h=args.h, epsilon=args.epsilon, sa_params=sa
    )
    _emit_report(report_document(report), args)
    return EXIT_OK


def _emit_report(doc: dict, args) -> None:
    if args.format == "json":
        _write_out(json.dumps(doc, indent=2) + "\n", args.out)
        return
    lines = [f"solver: {doc['solver']} ({doc['certificate']})"]
    names = {s["index"]: s["label"] for s in doc.get("schools", [])}
    shown = [
        names.get(i) or f"school {i + 1}" for i in doc.get("members", [])
    ]
    lines.append("apply to: " + (", ".join(shown) if shown else "(nothing)"))
    lines.append(f"expected utility: {_fmt_value(doc['value'], True)}")
    if doc.get("optimum_upper_bound") is not None and doc["certificate"] != "exact":
        lines.append(f"optimum at most: {_fmt_value(doc['optimum_upper_bound'], True)}")
    if "nodes" in doc:
        lines.append(f"nodes: {doc['nodes']}")
    if "iterations" in doc:
        lines.append(f"iterations: {doc['iterations']}")
    if "wall_ms" in doc:
        lines.append(f"wall time: {doc['wall_ms']:.3f} ms")
    _write_out("\n".join(lines) + "\n", args.out)


def cmd_frontier(args) -> int:
    raw = _read_raw(args.market)
    try:
        market = raw.to_market()
    except TrivialInstance:
        print("error: no school survives preprocessing", file=sys.stderr)
        return EXIT_REFUSED
    if not market.unit_costs:
        print(
            "error: the value frontier needs unit application costs", file=sys.stderr
        )
        return EXIT_REFUSED
    front = greedy_optimal(market, market.size)
    doc = frontier_document(front)
    if args.format == "csv":
        lines = ["h,index,label,value"]
        for e in doc["entries"]:
            label = e["label"] or ""
            lines.append(f"{e['h']},{e['index']},{label},{e['value']!r}")
        _write_out("\n".join(lines) + "\n", args.out)
    else:
        _write_out(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    config = GeneratorConfig(m=args.m, mode=args.mode, seed=args.seed)
    market = generate_market(config)
    _write_out(write_market(market), args.out)
    return EXIT_OK


def cmd_reduce_knapsack(args) -> int:
    kp = (
        read_knapsack(sys.stdin.read())
        if args.knapsack == "-"
        else read_knapsack(args.knapsack)
    )
    market, _ = knapsack_to_market(kp)
    _write_out(write_market(market), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    wrote = []
    experiments = args.experiment or ["1", "2", "3"]
    for exp in experiments:
        if exp == "1":
            sizes = args.sizes or bench.EXP1_SIZES
            rep = bench.experiment1(sizes, args.instances, args.reps, args.seed)
            path = outdir / "experiment1.csv"
            path.write_text(rep.to_csv())
        elif exp == "2":
            sizes = args.sizes or bench.EXP2_SIZES
            rep = bench.experiment2(sizes, args.instances, args.reps, args.seed)
            path = outdir / "experiment2.csv"
            path.write_text(rep.to_csv())
        elif exp == "3":
            rep = bench.experiment3(count=args.count, seed=args.seed)
            path = outdir / "experiment3.csv"
            path.write_text(rep.to_csv())
        elif exp == "backends":
            sizes = args.sizes or (64, 256)
            rep = bench.experiment_backends(sizes, args.instances, args.reps, args.seed)
            path = outdir / "backends.csv"
            path.write_text(rep.to_csv())
        else:
            print(f"error: unknown experiment {exp!r}", file=sys.stderr)
            return EXIT_INVALID
        wrote.append(str(path))
    for p in wrote:
        print(p)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="collegeapp",
        description="Optimal college application portfolios under a budget.",
    )
    p.add_argument("--version", action="version", version=f"collegeapp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve a market file ('-' for stdin)")
    ps.add_argument("market")
    ps.add_argument(
        "--algorithm",
        default="auto",
        choices=["auto", "greedy", "bnb", "dp", "fptas", "sa"],
        help="auto picks greedy for unit costs, dp for integer costs, else fptas",
    )
    ps.add_argument("--h", type=int, default=None, help="application limit for greedy")
    ps.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    ps.add_argument("--seed", type=int, default=0, help="RNG seed for sa")
    ps.add_argument("--sa-T", type=float, default=0.25, dest="sa_T")
    ps.add_argument("--sa-r", type=float, default=1 / 16, dest="sa_r")
    ps.add_argument("--sa-N", type=int, default=500, dest="sa_N")
    ps.add_argument("--format", choices=["human", "json"], default="human")
    ps.add_argument("--out", default=None)
    ps.set_defaults(fn=cmd_solve)

    pf = sub.add_parser("frontier", help="entry order and value for every limit h")
    pf.add_argument("market")
    pf.add_argument("--format", choices=["json", "csv"], default="json")
    pf.add_argument("--out", default=None)
    pf.set_defaults(fn=cmd_frontier)

    pg = sub.add_parser("generate", help="write a synthetic market as JSON")
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument(
        "--mode", choices=["homogeneous", "heterogeneous"], default="heterogeneous"
    )
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", default=None)
    pg.set_defaults(fn=cmd_generate)

    pr = sub.add_parser(
        "reduce-knapsack", help="encode a knapsack instance as a market"
    )
    pr.add_argument("knapsack", help="knapsack JSON file ('-' for stdin)")
    pr.add_argument("--out", default=None)
    pr.set_defaults(fn=cmd_reduce_knapsack)

    pb = sub.add_parser("bench", help="run the timing/accuracy experiments")
    pb.add_argument(
        "--experiment",
        action="append",
        choices=["1", "2", "3", "backends"],
        help="repeatable; default runs 1, 2, and 3",
    )
    pb.add_argument("--sizes", type=lambda s: tuple(int(x) for x in s.split(",")), default=None)
    pb.add_argument("--instances", type=int, default=50)
    pb.add_argument("--reps", type=int, default=3)
    pb.add_argument("--count", type=int, default=500, help="experiment 3 market count")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--out", default=None, help="output directory for CSV files")
    pb.set_defaults(fn=cmd_bench)

    pv = sub.add_parser("serve", help="start the HTTP service")
    pv.add_argument("--host", default="127.0.0.1")
    pv.add_argument("--port", type=int, default=8000)
    pv.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaViolation, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverRefusal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except MarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
