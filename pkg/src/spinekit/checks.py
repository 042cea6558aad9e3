"""Seeded consistency suites. Each returns a JSON-ready dict with an ``ok`` flag."""

from __future__ import annotations

import random
from fractions import Fraction

from .correlation import correlation_direct, correlation_miwa
from .hirota import delta_tau, hirota_check, insertion_series, lifted_plucker_check, plucker_check
from .moments import provider_circular, random_rational_table
from .oracle import partition_symbolic, quadrature_circle, recenter
from .spine import SpineContext, build_spine, vandermonde_check
from .tau import GramForm, hyperpfaffian, lifted_apply, tau_derivative, tau_polynomial

DEFAULT_SEED = 20240601
SMALL_CONFIGS = ((2, 2), (2, 3), (4, 2))


def distinct_rationals(rng: random.Random, n: int, span: int = 12, denom: int = 9, nonzero: bool = False) -> list[Fraction]:
    out: list[Fraction] = []
    while len(out) < n:
        q = Fraction(rng.randint(-span * denom, span * denom), rng.randint(1, denom))
        if q in out or (nonzero and q == 0):
            continue
        out.append(q)
    return out


def _case(ok: bool, **info) -> dict:
    return {"ok": bool(ok), **{k: str(v) if isinstance(v, Fraction) else v for k, v in info.items()}}


def _suite(name: str, seed: int, cases: list[dict]) -> dict:
    return {"suite": name, "seed": seed, "ok": all(c["ok"] for c in cases), "cases": cases}


def suite_vandermonde(seed: int = DEFAULT_SEED, trials: int = 5) -> dict:
    rng = random.Random(seed)
    cases = []
    for L, M in SMALL_CONFIGS:
        ctx = SpineContext(L, M)
        for _ in range(trials):
            rep = vandermonde_check(distinct_rationals(rng, M), ctx)
            cases.append(_case(rep.equal, L=L, M=M, points=[str(p) for p in rep.points], residual=str(rep.lhs - rep.rhs)))
    return _suite("vandermonde", seed, cases)


def suite_plucker(seed: int = DEFAULT_SEED) -> dict:
    cases = []
    for L, N in SMALL_CONFIGS:
        rep = plucker_check(build_spine(SpineContext(L, N)))
        bad = {n: c for n, c in rep.residual_terms.items() if c}
        cases.append(_case(rep.ok, L=L, N=N, sectors=len(rep.residual_terms), nonzero_sectors=bad))
    return _suite("plucker", seed, cases)


def suite_hirota(seed: int = DEFAULT_SEED, backgrounds: int = 20, M: int = 2, L: int = 2) -> dict:
    """Bilinear product, lifted Plucker sums and first-order hole route per background pair."""
    rng = random.Random(seed)
    ctx_M1 = SpineContext(L, M + 1)
    hi = 2 * ctx_M1.P + 2 * ctx_M1.P
    cases = []
    for _ in range(backgrounds):
        s_t, s_tp = rng.randrange(2**31), rng.randrange(2**31)
        t = random_rational_table(0, hi, s_t)
        tp = random_rational_table(0, hi, s_tp)
        rep = hirota_check(t, tp, M, L)
        info = rep.to_json()
        cases.append(_case(rep.product_vanishes, check="product", seeds=[s_t, s_tp], **info))
        lp = lifted_plucker_check(t, tp, M, L)
        cases.append(_case(lp.ok, check="lifted_plucker", seeds=[s_t, s_tp], nonzero_pairings=lp.nonzero_pairings,
                           residual_terms=len(lp.sums.terms)))
        cmp_ = delta_tau(tp, ctx_M1)
        first = cmp_.wedge[-1] == cmp_.miwa[-1]
        cases.append(_case(first, check="delta_tau_first_order", seeds=[s_tp],
                           wedge=str(cmp_.wedge[-1]), miwa=str(cmp_.miwa[-1])))
    return _suite("hirota", seed, cases)


def suite_routes(seed: int = DEFAULT_SEED, trials: int = 5) -> dict:
    """Correlation routes, particle insertion routes, derivative and lifting identities."""
    rng = random.Random(seed)
    cases = []
    for L, M, m in ((2, 2, 1), (2, 3, 1), (2, 3, 2)):
        ctx = SpineContext(L, M)
        prov = random_rational_table(0, 2 * ctx.P + ctx.beta * m, rng.randrange(2**31))
        ratios = []
        for _ in range(trials):
            pts = distinct_rationals(rng, m, nonzero=True)
            d = correlation_direct(ctx, pts, prov)
            w = correlation_miwa(ctx, pts, prov)
            ratios.append(None if w == 0 else Fraction(d) / Fraction(w))
        ok = None not in ratios and len(set(ratios)) == 1
        cases.append(_case(ok, check="correlation", L=L, M=M, m=m, ratios=[str(r) for r in ratios]))
    for L, M in ((2, 2), (2, 3), (4, 2)):
        ctx = SpineContext(L, M)
        prov = random_rational_table(0, 2 * ctx.P + ctx.beta, rng.randrange(2**31))
        cmp_ = insertion_series(prov, ctx)
        cases.append(_case(cmp_.proportional, check="insertion", L=L, M=M, ratio=str(cmp_.ratio)))
    for L, M in ((2, 2), (2, 3)):
        ctx = SpineContext(L, M)
        prov = random_rational_table(-3, 2 * ctx.P + 3, rng.randrange(2**31))
        tp = tau_polynomial(ctx)
        tau = tp.evaluate(prov)
        for k in range(-3, 4):
            a, b = tau_derivative(ctx, prov, k), tp.derivative(prov, k)
            cases.append(_case(a == b, check="derivative", L=L, M=M, k=k, residual=str(a - b)))
        e = tp.derivative(prov, 0)
        cases.append(_case(e == M * tau, check="euler", L=L, M=M, residual=str(e - M * tau)))
        q1 = lifted_apply({0: 1}, ctx, prov)
        cases.append(_case(q1 == tau, check="lift_identity", L=L, M=M, residual=str(q1 - tau)))
    return _suite("routes", seed, cases)


def suite_oracle(seed: int = DEFAULT_SEED) -> dict:
    cases = []
    for L, M in SMALL_CONFIGS:
        ctx = SpineContext(L, M)
        sym = recenter(partition_symbolic(L, M), ctx.P)
        tp = tau_polynomial(ctx).terms
        cases.append(_case(sym == tp, check="symbolic", L=L, M=M, terms=len(tp)))
        z_exact = hyperpfaffian(GramForm.from_moments(ctx, provider_circular(ctx)))
        z_quad = quadrature_circle(L, M, "Z")
        rel = abs(z_quad - float(z_exact)) / abs(float(z_exact))
        cases.append(_case(rel < 1e-9, check="quadrature", L=L, M=M, exact=str(z_exact), quadrature=z_quad, rel_err=rel))
    return _suite("oracle", seed, cases)


SUITES = {
    "vandermonde": suite_vandermonde,
    "plucker": suite_plucker,
    "hirota": suite_hirota,
    "routes": suite_routes,
    "oracle": suite_oracle,
}


def run_suites(names, seed: int = DEFAULT_SEED) -> dict:
    results = [SUITES[n](seed=seed) for n in names]
    return {"seed": seed, "ok": all(r["ok"] for r in results), "suites": results}
