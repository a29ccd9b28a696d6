"""Command-line interface: verify, bench, gen.

Exit codes for ``verify``: 0 TRUE, 1 FALSE, 2 UNKNOWN, 3 input error.  Bench
output is deterministic by default; measured durations go into the CSV only
with --timings, because wall-clock noise would break byte-stable output (the
JSON stats from ``verify`` always carry real durations).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import multiprocessing
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path as FsPath
from typing import Optional

from .engine import Limits, RunStats, Verdict, cegar
from .frontend import ParseError, cfa_to_dot, load_cfa
from .generators import generate_fig2_family, generate_random_programs
from .paths import render_path
from .refinement import Heuristic

HEURISTIC_NAMES = [h.value for h in Heuristic]

log = logging.getLogger("prefixselect.cli")


def _configure_logging() -> None:
    level_name = os.environ.get("PREFIXSELECT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _run_file(
    path: str, heuristic: Heuristic, limits: Limits
) -> tuple[Verdict, RunStats]:
    cfa = load_cfa(FsPath(path).read_text(encoding="utf-8"))
    return cegar(cfa, heuristic, limits)


def _child_run(conn, path: str, heuristic_name: str, limits: Limits) -> None:
    try:
        verdict, stats = _run_file(path, Heuristic(heuristic_name), limits)
        conn.send(("ok", verdict, stats))
    except Exception as exc:  # reported as an UNKNOWN row by the parent
        conn.send(("error", str(exc), None))
    finally:
        conn.close()


def _run_with_timeout(
    path: str, heuristic: Heuristic, limits: Limits, timeout: float
) -> tuple[Verdict, RunStats]:
    ctx = multiprocessing.get_context("fork")
    parent_conn, child_conn = ctx.Pipe(duplex=False)
    proc = ctx.Process(
        target=_child_run, args=(child_conn, path, heuristic.value, limits)
    )
    proc.start()
    child_conn.close()
    proc.join(timeout)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return Verdict("UNKNOWN", reason="timeout"), RunStats()
    if parent_conn.poll():
        status, payload, stats = parent_conn.recv()
        if status == "ok":
            return payload, stats
        raise RuntimeError(payload)
    raise RuntimeError("verification process died without a result")


# --- verify -------------------------------------------------------------------


def _stats_json(verdict: Verdict, heuristic: Heuristic, stats: RunStats) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = render_path(verdict.witness).splitlines()
    return {
        "verdict": verdict.render(),
        "heuristic": heuristic.value,
        "refinements": stats.refinements,
        "prefixes_total": stats.prefixes_total,
        "interpolation_calls": stats.interpolation_calls,
        "states_created": stats.states_created,
        "coverage_hits": stats.coverage_hits,
        "chosen_prefix_indices": stats.chosen_prefix_indices,
        "chosen_prefix_scores": stats.chosen_prefix_scores,
        "duration_ms": stats.duration_ms,
        "witness": witness,
    }


def cmd_verify(args: argparse.Namespace) -> int:
    limits = Limits(args.max_refinements, args.max_states)
    heuristic = Heuristic(args.heuristic)
    try:
        source = FsPath(args.file).read_text(encoding="utf-8")
        cfa = load_cfa(source)
    except (OSError, ParseError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    if args.emit_cfa:
        FsPath(args.emit_cfa).write_text(cfa_to_dot(cfa), encoding="utf-8")
    if args.timeout is not None:
        try:
            verdict, stats = _run_with_timeout(
                args.file, heuristic, limits, args.timeout
            )
        except RuntimeError as exc:
            print("error: %s" % exc, file=sys.stderr)
            return 3
    else:
        verdict, stats = cegar(cfa, heuristic, limits)
    if args.format == "json":
        print(json.dumps(_stats_json(verdict, heuristic, stats)))
    else:
        print("heuristic: %s" % heuristic.value)
        print("refinements: %d" % stats.refinements)
        print("sliced prefixes: %d" % stats.prefixes_total)
        print("interpolation calls: %d" % stats.interpolation_calls)
        print("states created: %d" % stats.states_created)
        print("coverage hits: %d" % stats.coverage_hits)
        print("duration: %.1f ms" % stats.duration_ms)
        if args.stats and stats.chosen_prefix_indices:
            print("chosen prefix indices: %s" % stats.chosen_prefix_indices)
            print("chosen prefix scores: %s" % stats.chosen_prefix_scores)
        if verdict.witness is not None:
            print("witness:")
            print(render_path(verdict.witness))
        print("RESULT: %s" % verdict.render())
    return {"TRUE": 0, "FALSE": 1, "UNKNOWN": 2}[verdict.kind]


# --- bench --------------------------------------------------------------------

BENCH_COLUMNS = [
    "task",
    "heuristic",
    "verdict",
    "refinements",
    "states",
    "interpolation_calls",
    "duration_ms",
]


def _bench_one(
    task: FsPath, heuristic: Heuristic, limits: Limits, timeout: Optional[float]
) -> dict:
    try:
        if timeout is not None:
            verdict, stats = _run_with_timeout(str(task), heuristic, limits, timeout)
        else:
            verdict, stats = _run_file(str(task), heuristic, limits)
    except Exception as exc:
        log.warning("task %s failed: %s", task.name, exc)
        verdict, stats = Verdict("UNKNOWN", reason="error"), RunStats()
    return {
        "task": task.name,
        "heuristic": heuristic.value,
        "verdict": verdict.render(),
        "refinements": stats.refinements,
        "states": stats.states_created,
        "interpolation_calls": stats.interpolation_calls,
        "duration_ms": stats.duration_ms,
    }


def run_bench(
    directory: str | FsPath,
    heuristics: list[Heuristic],
    limits: Limits,
    timeout: Optional[float] = None,
    jobs: int = 1,
) -> list[dict]:
    """Run every (task, heuristic) pair; rows come back in deterministic
    (task, heuristic) order regardless of completion order."""
    tasks = sorted(FsPath(directory).glob("*.imp"))
    pairs = [(t, h) for t in tasks for h in heuristics]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(lambda p: _bench_one(p[0], p[1], limits, timeout), pairs)
            )
    else:
        rows = [_bench_one(t, h, limits, timeout) for t, h in pairs]
    return rows


def _solved(row: dict) -> bool:
    return row["verdict"] in ("TRUE", "FALSE")


def format_bench_csv(rows: list[dict], heuristics: list[Heuristic], timings: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row["task"],
                row["heuristic"],
                row["verdict"],
                row["refinements"],
                row["states"],
                row["interpolation_calls"],
                "%.1f" % row["duration_ms"] if timings else "",
            ]
        )
    buf.write("# summary\n")
    buf.write("# heuristic,solved,tasks,total_duration_ms\n")
    for h in heuristics:
        hrows = [r for r in rows if r["heuristic"] == h.value]
        total = sum(r["duration_ms"] for r in hrows)
        buf.write(
            "# %s,%d,%d,%s\n"
            % (
                h.value,
                sum(1 for r in hrows if _solved(r)),
                len(hrows),
                "%.1f" % total if timings else "",
            )
        )
    return buf.getvalue()


def format_bench_json(rows: list[dict], heuristics: list[Heuristic], timings: bool) -> str:
    out_rows = []
    for row in rows:
        copy = dict(row)
        if not timings:
            copy["duration_ms"] = None
        out_rows.append(copy)
    summary = {}
    for h in heuristics:
        hrows = [r for r in rows if r["heuristic"] == h.value]
        summary[h.value] = {
            "solved": sum(1 for r in hrows if _solved(r)),
            "tasks": len(hrows),
            "total_duration_ms": sum(r["duration_ms"] for r in hrows)
            if timings
            else None,
        }
    return json.dumps({"rows": out_rows, "summary": summary}, indent=2)


def cmd_bench(args: argparse.Namespace) -> int:
    limits = Limits(args.max_refinements, args.max_states)
    try:
        heuristics = [Heuristic(h.strip()) for h in args.heuristics.split(",")]
    except ValueError:
        print(
            "error: unknown heuristic; choose from %s" % ", ".join(HEURISTIC_NAMES),
            file=sys.stderr,
        )
        return 3
    if not FsPath(args.dir).is_dir():
        print("error: not a directory: %s" % args.dir, file=sys.stderr)
        return 3
    rows = run_bench(args.dir, heuristics, limits, args.timeout, args.jobs)
    if args.format == "json":
        print(format_bench_json(rows, heuristics, args.timings))
    else:
        sys.stdout.write(format_bench_csv(rows, heuristics, args.timings))
    return 0


# --- gen ----------------------------------------------------------------------


def cmd_gen_fig2(args: argparse.Namespace) -> int:
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return 3
    path = generate_fig2_family(args.n, args.out)
    print(path)
    return 0


def cmd_gen_random(args: argparse.Namespace) -> int:
    if args.count < 1:
        print("error: --count must be >= 1", file=sys.stderr)
        return 3
    for path in generate_random_programs(args.seed, args.count, args.out):
        print(path)
    return 0


# --- entry --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefixselect",
        description="CEGAR model checker with sliced-prefix refinement selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="verify a single .imp file")
    verify.add_argument("file")
    verify.add_argument(
        "--heuristic", choices=HEURISTIC_NAMES, default=Heuristic.DOMAIN_TYPE.value
    )
    verify.add_argument("--max-refinements", type=int, default=200)
    verify.add_argument("--max-states", type=int, default=1_000_000)
    verify.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    verify.add_argument("--format", choices=["human", "json"], default="human")
    verify.add_argument("--emit-cfa", metavar="OUT.DOT", default=None)
    verify.add_argument("--stats", action="store_true", help="per-refinement detail")
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="run all .imp files in a directory")
    bench.add_argument("dir")
    bench.add_argument(
        "--heuristics",
        default=",".join(HEURISTIC_NAMES),
        help="comma-separated heuristic names",
    )
    bench.add_argument("--format", choices=["csv", "json"], default="csv")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--max-refinements", type=int, default=200)
    bench.add_argument("--max-states", type=int, default=1_000_000)
    bench.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    bench.add_argument(
        "--timings",
        action="store_true",
        help="include measured durations (output no longer byte-stable)",
    )
    bench.set_defaults(func=cmd_bench)

    gen = sub.add_parser("gen", help="generate benchmark programs")
    gen_sub = gen.add_subparsers(dest="generator", required=True)

    fig2 = gen_sub.add_parser("fig2", help="flag/loop family program")
    fig2.add_argument("--n", type=int, required=True)
    fig2.add_argument("--out", required=True)
    fig2.set_defaults(func=cmd_gen_fig2)

    rnd = gen_sub.add_parser("random", help="random program corpus")
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("--count", type=int, required=True)
    rnd.add_argument("--out", required=True)
    rnd.set_defaults(func=cmd_gen_random)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
