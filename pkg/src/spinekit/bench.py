"""Wedge-power strategy benchmark with a built-in exactness gate."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

from .moments import random_rational_table
from .spine import SpineContext
from .tau import GramForm, WedgeStats, hyperpfaffian

STRATEGIES = ("naive", "squaring", "filtered", "pruned")
_INTERNAL = {"naive": "iterated", "squaring": "squaring", "filtered": "filtered", "pruned": "pruned"}


@dataclass
class BenchRow:
    strategy: str
    seconds: float
    peak_terms: int
    peak_multisets: int
    pair_ops: int
    value: str


def zero_band_count(ctx: SpineContext) -> int:
    """Number of sorted momentum multisets of size ``N`` in ``[-P, P]`` with zero sum."""
    P, N = ctx.P, ctx.N

    def count(rem: int, lo: int, total: int) -> int:
        if rem == 0:
            return int(total == 0)
        n = 0
        for j in range(lo, P + 1):
            if total + rem * j > 0:
                break
            if total + j + (rem - 1) * P < 0:
                continue
            n += count(rem - 1, j, total + j)
        return n

    return count(N, -P, 0)


@dataclass
class BenchReport:
    L: int
    M: int
    seed: int
    blades: int
    sectors: int
    zero_band: int
    rows: list[BenchRow]

    @property
    def intermediate_bound(self) -> int:
        """``max_k C(LM, kL)``: the most blades any partial power ``gamma^k`` can have."""
        return max(math.comb(self.L * self.M, k * self.L) for k in range(1, self.M + 1))

    @property
    def agree(self) -> bool:
        return len({r.value for r in self.rows}) == 1

    def row(self, strategy: str) -> BenchRow:
        return next(r for r in self.rows if r.strategy == strategy)

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "rows"}
        out["rows"] = [asdict(r) for r in self.rows]
        out["agree"] = self.agree
        names = {r.strategy for r in self.rows}
        if {"naive", "pruned"} <= names:
            naive, pruned = self.row("naive"), self.row("pruned")
            out["speedup_pruned_vs_naive"] = naive.seconds / max(pruned.seconds, 1e-9)
            out["pair_op_ratio_naive_vs_pruned"] = naive.pair_ops / max(pruned.pair_ops, 1)
        out["intermediate_bound"] = self.intermediate_bound
        if "naive" in names:
            out["naive_peak_over_blades"] = self.row("naive").peak_terms / self.blades
            out["naive_peak_over_intermediate_bound"] = self.row("naive").peak_terms / self.intermediate_bound
        return out

    def table(self) -> str:
        head = f"{'strategy':<10} {'seconds':>10} {'peak_terms':>11} {'peak_msets':>10} {'pair_ops':>12}"
        lines = [
            f"L={self.L} M={self.M} seed={self.seed}: C(LM,L)={self.blades} max_k C(LM,kL)={self.intermediate_bound} sectors={self.sectors} zero-band multisets={self.zero_band}",
            head,
        ]
        for r in self.rows:
            lines.append(f"{r.strategy:<10} {r.seconds:>10.4f} {r.peak_terms:>11} {r.peak_multisets:>10} {r.pair_ops:>12}")
        lines.append("exact results identical: " + ("yes" if self.agree else "NO"))
        return "\n".join(lines)


def run_bench(L: int, M: int, strategies=STRATEGIES, seed: int = 0) -> BenchReport:
    ctx = SpineContext(L, M)
    provider = random_rational_table(0, ctx.beta * (M - 1), seed)
    gram = GramForm.from_moments(ctx, provider)
    rows = []
    for name in strategies:
        stats = WedgeStats()
        t0 = time.perf_counter()
        val = hyperpfaffian(gram, _INTERNAL[name], stats=stats)
        dt = time.perf_counter() - t0
        peak = stats.peak_terms
        if name in ("naive", "squaring", "filtered"):
            peak = max(peak, ctx.n_blades)
        rows.append(BenchRow(name, dt, peak, stats.peak_multisets, stats.pair_ops, str(val)))
    return BenchReport(L, M, seed, math.comb(ctx.dim, L), ctx.n_sectors, zero_band_count(ctx), rows)
