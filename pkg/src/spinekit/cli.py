"""``spinekit`` command-line tool.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 budget exceeded,
4 cache checksum failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from .checks import DEFAULT_SEED, SUITES, run_suites
from .correlation import circular_pair_curve, circular_pair_curve_float, emit_curve
from .exact_core import BudgetError, ContractError
from .spine import SpineContext, build_spine
from .tau import CacheError, WedgeStats, load_table, pair_constants_circular, save_table, tau_polynomial

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_CHECKSUM = 0, 1, 2, 3, 4

# exact tables are refused beyond this many basis blades
DEFAULT_TABLE_BLADES = 200_000
# configurations whose exact pair table is out of reach; the float path is opt-in
STRETCH_L = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _context(args) -> SpineContext:
    try:
        return SpineContext(args.L, args.M)
    except ContractError as exc:
        raise UsageError(str(exc)) from None


def _emit(obj: dict, path: str | None):
    text = json.dumps(obj, indent=2, default=str)
    if path:
        Path(path).write_text(text + "\n")
    print(text)


def _check_budget(ctx: SpineContext, limit: int):
    if ctx.n_blades > limit:
        raise BudgetError(
            f"L={ctx.L} M={ctx.N}: C({ctx.dim},{ctx.L}) = {ctx.n_blades} blades exceeds --max-blades {limit}"
        )


def cmd_spine(args) -> int:
    ctx = _context(args)
    _emit(build_spine(ctx).summary(), args.json)
    return EXIT_OK


def _build_table(ctx: SpineContext, kind: str, threads: int, stats: WedgeStats):
    if kind == "tau":
        return tau_polynomial(ctx, stats)
    return pair_constants_circular(ctx, threads=threads, stats=stats)


def cmd_tables(args) -> int:
    ctx = _context(args)
    cache_dir = Path(args.cache_dir) if args.cache_dir else None
    kind = "tau" if args.kind == "tau" else "pair_constants"
    existing = load_table(ctx.L, ctx.N, kind, cache_dir)
    if existing is not None:
        print(f"cache hit: {kind} L={ctx.L} M={ctx.N} digest={existing.to_json()['digest']}")
        return EXIT_OK
    _check_budget(ctx, args.max_blades)
    stats = WedgeStats()
    t0 = time.perf_counter()
    table = _build_table(ctx, args.kind, args.threads, stats)
    path = save_table(table, cache_dir)
    n = len(table.terms) if kind == "tau" else len(table.values)
    print(f"wrote {path} ({n} entries, {time.perf_counter() - t0:.2f}s, peak terms {stats.peak_terms})")
    return EXIT_OK


def cmd_curve(args) -> int:
    ctx = _context(args)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if ctx.N < 2:
        raise UsageError("a pair curve needs M >= 2")
    if ctx.L >= STRETCH_L:
        if not args.stretch_float:
            print(
                f"refusing L={ctx.L} M={ctx.N}: the exact pair table is out of budget "
                f"(C({ctx.dim},{ctx.L}) = {ctx.n_blades} blades). Pass --stretch-float to use "
                "the float quadrature path, whose normalization holds only to rounding.",
                file=sys.stderr,
            )
            return EXIT_USAGE
        curve = circular_pair_curve_float(ctx.L, ctx.N)
    else:
        cache_dir = Path(args.cache_dir) if args.cache_dir else None
        table = load_table(ctx.L, ctx.N, "pair_constants", cache_dir)
        if table is None:
            _check_budget(ctx, args.max_blades)
            table = pair_constants_circular(ctx, threads=args.threads)
            save_table(table, cache_dir)
        curve = circular_pair_curve(ctx.L, ctx.N, table)
    path = emit_curve(curve, args.grid, args.out)
    print(f"wrote {path}: integral_0^pi R2 = {curve.integral_over_half_period()}")
    return EXIT_OK


def cmd_check(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = run_suites(names, args.seed)
    _emit(report, args.json)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_bench(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    unknown = set(strategies) - set(bench_mod.STRATEGIES)
    if unknown:
        raise UsageError(f"unknown strategies {sorted(unknown)}; choose from {list(bench_mod.STRATEGIES)}")
    ctx = _context(args)
    _check_budget(ctx, args.max_blades)
    report = bench_mod.run_bench(ctx.L, ctx.N, strategies, seed=args.seed)
    print(report.table())
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return EXIT_OK if report.agree else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spinekit", description="Exact beta-ensemble tables on the momentum spine.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def lm(sp, M_default=None):
        sp.add_argument("--L", type=int, required=True)
        sp.add_argument("--M", type=int, required=M_default is None, default=M_default)

    s = sub.add_parser("spine", parents=[common], help="sector sizes of the momentum spine")
    lm(s)
    s.add_argument("--json", help="also write the summary here")
    s.set_defaults(func=cmd_spine)

    s = sub.add_parser("tables", parents=[common], help="build or verify a cached exact table")
    lm(s)
    s.add_argument("--kind", choices=("tau", "pair"), required=True)
    s.add_argument("--cache-dir", help="defaults to $SPINEKIT_CACHE_DIR or ~/.cache/spinekit")
    s.add_argument("--max-blades", type=int, default=DEFAULT_TABLE_BLADES)
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("curve", parents=[common], help="write the circular pair-correlation curve as CSV")
    lm(s)
    s.add_argument("--grid", type=int, default=10_000)
    s.add_argument("--out", required=True)
    s.add_argument("--cache-dir")
    s.add_argument("--max-blades", type=int, default=DEFAULT_TABLE_BLADES)
    s.add_argument("--stretch-float", action="store_true", help="allow the float path for large L")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("check", parents=[common], help="run seeded consistency suites")
    s.add_argument("--suite", choices=("all", *SUITES), default="all")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--json", help="also write the report here")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("bench", parents=[common], help="compare wedge-power strategies")
    lm(s)
    s.add_argument("--strategies", default=",".join(bench_mod.STRATEGIES))
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--max-blades", type=int, default=DEFAULT_TABLE_BLADES)
    s.add_argument("--json", help="also write the report here")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("spinekit: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spinekit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CacheError as exc:
        print(f"spinekit: checksum failure: {exc}", file=sys.stderr)
        return EXIT_CHECKSUM
    except BudgetError as exc:
        print(f"spinekit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
