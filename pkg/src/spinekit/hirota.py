"""Plucker relations, the hole form and the finite-M bilinear checks.

Realisation choices (none of them is pinned down by the formalism itself):

* ``eps_j^*`` is the dual form ``sum_{p_u=j} w_u e_u^* / |eps_j|^2``, the unique
  element of the dual spine with ``eps_j^*(eps_k) = delta_jk`` under the
  coefficientwise pairing.
* The same coefficients on the primal sectors, ``sum_j C m_{j+k} eps_j``, are
  exactly the ``z^{-k}`` part of ``gamma(t' + L^2[z^-1]) - gamma(t')``; that
  primal version is what first-order expansion of ``tau_{M+1}`` needs.

Every bilinear quantity is returned as a :class:`LaurentPoly` so callers can
inspect all coefficients, not only ``z^0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact_core import LaurentPoly, SparseForm, as_dual, contract, pairing, top_pairing, wedge
from .moments import MomentSequence, miwa_insert, miwa_remove
from .spine import SpineBasis, SpineContext, build_spine
from .tau import GramForm, tau_polynomial, wedge_power


@dataclass
class PluckerReport:
    context: SpineContext
    residual_terms: dict[int, int]

    @property
    def ok(self) -> bool:
        return not any(self.residual_terms.values())


def plucker_check(basis: SpineBasis) -> PluckerReport:
    """``sum_{j+k=n} eps_j ^ eps_k`` for every ``n`` in ``[-2P, 2P]``."""
    ctx = basis.context
    if 2 * ctx.L > ctx.dim:
        return PluckerReport(ctx, {})
    P = ctx.P
    out = {}
    for n in range(-2 * P, 2 * P + 1):
        acc = SparseForm.zero(2 * ctx.L, ctx.dim)
        for j in range(max(-P, n - P), min(P, n + P) + 1):
            acc = acc + wedge(basis[j], basis[n - j])
        out[n] = len(acc)
    return PluckerReport(ctx, out)


def dual_sector(basis: SpineBasis, j: int) -> SparseForm:
    e = basis[j]
    norm = sum(v * v for v in e.terms.values())
    return SparseForm(e.degree, e.dim, {k: Fraction(v, norm) for k, v in e.terms.items()}, dual=True)


@dataclass
class HoleForm:
    """``Omega(z) = sum_{k=1}^{2P} z^{-k} phi_k`` with ``phi_k`` in the dual spine."""

    context: SpineContext
    weights: dict[int, dict[int, Any]]
    coeffs: dict[int, SparseForm] = field(repr=False)

    def primal(self, k: int) -> SparseForm:
        """``phi_k`` with ``eps_j^*`` replaced by ``eps_j`` (the Gram-form increment)."""
        basis = build_spine(self.context)
        acc = SparseForm.zero(self.context.L, self.context.dim)
        for j, c in self.weights.get(k, {}).items():
            acc = acc + basis[j].scale(c)
        return acc

    def decomposability_residuals(self, primal: bool = False) -> dict[int, int]:
        """Number of nonzero blades in ``sum_{k+k'=n} phi_k ^ phi_k'``, per ``n``."""
        if 2 * self.context.L > self.context.dim:
            return {}
        get = self.primal if primal else self.coeffs.__getitem__
        ks = sorted(self.coeffs)
        out = {}
        for n in range(2, 2 * ks[-1] + 1):
            acc = None
            for k in ks:
                kk = n - k
                if kk not in self.coeffs:
                    continue
                term = wedge(get(k), get(kk))
                acc = term if acc is None else acc + term
            if acc is not None:
                out[n] = len(acc)
        return out


def build_hole_form(provider: MomentSequence, ctx: SpineContext) -> HoleForm:
    """``phi_k = binom(L^2+k-1, k) sum_j m_{j+k} eps_j^*`` for ``k = 1..2P``."""
    basis = build_spine(ctx)
    duals = {j: dual_sector(basis, j) for j in range(-ctx.P, ctx.P + 1)}
    weights, coeffs = {}, {}
    for k in range(1, 2 * ctx.P + 1):
        c = math.comb(ctx.beta + k - 1, k)
        w = {j: c * provider.at(ctx, j + k) for j in range(-ctx.P, ctx.P + 1)}
        w = {j: v for j, v in w.items() if v != 0}
        weights[k] = w
        acc = SparseForm.zero(ctx.L, ctx.dim, dual=True)
        for j, v in w.items():
            acc = acc + duals[j].scale(v)
        coeffs[k] = acc
    return HoleForm(ctx, weights, coeffs)


@dataclass
class RouteComparison:
    """Two Laurent series that should agree up to one global scalar."""

    wedge: LaurentPoly
    miwa: LaurentPoly

    @property
    def ratios(self) -> dict[int, Any]:
        out = {}
        for k in set(self.wedge.terms) | set(self.miwa.terms):
            a, b = self.wedge[k], self.miwa[k]
            out[k] = None if b == 0 else Fraction(a) / Fraction(b)
        return out

    @property
    def ratio(self):
        """The common ratio wedge/miwa, or None if the routes are not proportional."""
        rs = set(self.ratios.values())
        if len(rs) == 1 and None not in rs:
            return rs.pop()
        return None

    @property
    def proportional(self) -> bool:
        return self.ratio is not None


def delta_tau(provider: MomentSequence, ctx: SpineContext) -> RouteComparison:
    """``tau_{N}(t' + L^2[z^-1]) - tau_{N}(t')`` through ``z^{-2P}``, two routes.

    ``ctx`` is the ``N = M + 1`` particle system. The Miwa route evaluates the
    tau-polynomial on shifted moments; the wedge route is the first-order term
    ``*(Omega ^ gamma^{^M}) / M!`` with the primal increment.
    """
    order = 2 * ctx.P
    tp = tau_polynomial(ctx)
    shifted = miwa_remove(provider, ctx, order)
    full = tp.evaluate(lambda j: shifted[j])
    miwa = (full - LaurentPoly.constant(full[0])).truncate_below(-order)
    hole = build_hole_form(provider, ctx)
    gamma = GramForm.from_moments(ctx, provider).realize()
    bg = wedge_power(gamma, ctx.N - 1, "iterated")
    fact = math.factorial(ctx.N - 1)
    wedge_route = LaurentPoly({-k: Fraction(top_pairing(hole.primal(k), bg)) / fact for k in hole.coeffs})
    return RouteComparison(wedge_route, miwa)


def insertion_series(provider: MomentSequence, ctx: SpineContext) -> RouteComparison:
    """``*(omega(z) ^ gamma^{^(N-1)})`` against ``z^{L^2(N-1)} tau_{N-1}(t - L^2[z^-1])``.

    ``ctx`` is the ``N``-particle system receiving the inserted particle.
    """
    basis = build_spine(ctx)
    P = ctx.P
    gamma = GramForm.from_moments(ctx, provider).realize()
    bg = wedge_power(gamma, ctx.N - 1, "iterated")
    wedge_route = LaurentPoly({P + j: top_pairing(basis[j], bg) for j in range(-P, P + 1)})
    if ctx.N == 1:
        inner = LaurentPoly.constant(1)
    else:
        small = ctx.with_N(ctx.N - 1)
        shifted = miwa_insert(provider, small)
        inner = tau_polynomial(small).evaluate(lambda j: shifted[j])
    miwa = inner.shift(ctx.beta * (ctx.N - 1))
    return RouteComparison(wedge_route, miwa)


@dataclass
class LiftedPluckerReport:
    """Per-momentum sums of ``<eps_k ^ psi, iota_{eps_j} phi>`` over ``j + k = n``."""

    sums: LaurentPoly
    nonzero_pairings: int

    @property
    def ok(self) -> bool:
        return not self.sums


def lifted_plucker_check(provider_t: MomentSequence, provider_tp: MomentSequence, M: int, L: int = 2) -> LiftedPluckerReport:
    """Plucker relations lifted through ``gamma(t)^{M-1}`` and ``gamma(t')^{M+1}``.

    ``eps_j`` acts by contraction through the flat identification
    ``e_u^* <-> e_u``. Individual pairings are generically nonzero; the sums
    cancel sector by sector.
    """
    ctx = SpineContext(L, M + 1)
    basis = build_spine(ctx)
    P = ctx.P
    g_t = GramForm.from_moments(ctx, provider_t).realize()
    g_tp = GramForm.from_moments(ctx, provider_tp).realize()
    psi = wedge_power(g_t, M - 1, "iterated") if M > 1 else SparseForm.scalar(1, ctx.dim)
    phi = wedge_power(g_tp, M + 1, "iterated")
    left = {k: wedge(basis[k], psi) for k in range(-P, P + 1)}
    right = {j: contract(as_dual(basis[j]), phi) for j in range(-P, P + 1)}
    acc: dict[int, Any] = {}
    count = 0
    for k, a in left.items():
        if not a:
            continue
        for j, b in right.items():
            v = pairing(a, b)
            if v:
                count += 1
                acc[j + k] = acc.get(j + k, 0) + v
    return LiftedPluckerReport(LaurentPoly(acc), count)


@dataclass
class HirotaReport:
    L: int
    M: int
    product: LaurentPoly
    pairing: LaurentPoly
    miwa: LaurentPoly

    @staticmethod
    def _max_abs(p: LaurentPoly):
        return max((abs(v) for v in p.terms.values()), default=0)

    @property
    def product_vanishes(self) -> bool:
        return not self.product

    @property
    def product_z0(self):
        return self.product[0]

    @property
    def miwa_z0(self):
        return self.miwa[0]

    def to_json(self) -> dict:
        return {
            "config": {"L": self.L, "M": self.M},
            "max_abs_residual": str(self._max_abs(self.product)),
            "z0": {"product": str(self.product[0]), "pairing": str(self.pairing[0]), "miwa": str(self.miwa[0])},
            "nonzero_coefficients": {
                "product": len(self.product.terms),
                "pairing": len(self.pairing.terms),
                "miwa": len(self.miwa.terms),
            },
        }


def insertion_factor(provider: MomentSequence, ctx_M: SpineContext) -> LaurentPoly:
    """``*(omega(z) ^ gamma(t)^{^(M-1)})`` in the ``M``-particle space."""
    return insertion_series(provider, ctx_M).wedge


def hole_factor(provider: MomentSequence, ctx_M1: SpineContext) -> LaurentPoly:
    """``*(Omega(z, t') ^ gamma(t')^{^M})`` in the ``(M+1)``-particle space (primal increment)."""
    hole = build_hole_form(provider, ctx_M1)
    gamma = GramForm.from_moments(ctx_M1, provider).realize()
    bg = wedge_power(gamma, ctx_M1.N - 1, "iterated")
    return LaurentPoly({-k: top_pairing(hole.primal(k), bg) for k in hole.coeffs})


def pairing_series(provider_t: MomentSequence, provider_tp: MomentSequence, ctx_M1: SpineContext) -> LaurentPoly:
    """``< omega(z) ^ gamma(t)^{^(M-1)}, iota_{Omega(z,t')} gamma(t')^{^(M+1)} >`` in dimension ``L(M+1)``."""
    basis = build_spine(ctx_M1)
    P = ctx_M1.P
    M = ctx_M1.N - 1
    g_t = GramForm.from_moments(ctx_M1, provider_t).realize()
    g_tp = GramForm.from_moments(ctx_M1, provider_tp).realize()
    psi = wedge_power(g_t, M - 1, "iterated") if M > 1 else SparseForm.scalar(1, ctx_M1.dim)
    phi = wedge_power(g_tp, M + 1, "iterated")
    hole = build_hole_form(provider_tp, ctx_M1)
    left = {k: wedge(basis[k], psi) for k in range(-P, P + 1)}
    right = {j: contract(hole.coeffs[j], phi) for j in hole.coeffs}
    acc: dict[int, Any] = {}
    for k, a in left.items():
        if not a:
            continue
        for j, b in right.items():
            v = pairing(a, b)
            if v:
                acc[P + k - j] = acc.get(P + k - j, 0) + v
    return LaurentPoly(acc)


def hirota_check(provider_t: MomentSequence, provider_tp: MomentSequence, M: int, L: int = 2) -> HirotaReport:
    """All three bilinear forms of the insertion/hole pairing.

    * ``product``: ``*(omega(z)^gamma(t)^{M-1}) * *(Omega(z,t')^gamma(t')^M)``
    * ``pairing``: the single pairing in dimension ``L(M+1)``
    * ``miwa``: ``tau_{M-1}(t - L^2[z^-1]) * Delta tau_{M+1}(z, t')``
    """
    ctx_M = SpineContext(L, M)
    ctx_M1 = SpineContext(L, M + 1)
    product = insertion_factor(provider_t, ctx_M) * hole_factor(provider_tp, ctx_M1)
    pair = pairing_series(provider_t, provider_tp, ctx_M1)
    if M == 1:
        left = LaurentPoly.constant(1)
    else:
        ctx_m = SpineContext(L, M - 1)
        shifted = miwa_insert(provider_t, ctx_m)
        left = tau_polynomial(ctx_m).evaluate(lambda j: shifted[j])
    miwa = left * delta_tau(provider_tp, ctx_M1).miwa
    return HirotaReport(L, M, product, pair, miwa)


__all__ = [
    "HirotaReport",
    "HoleForm",
    "LiftedPluckerReport",
    "PluckerReport",
    "RouteComparison",
    "build_hole_form",
    "delta_tau",
    "hirota_check",
    "insertion_series",
    "lifted_plucker_check",
    "plucker_check",
]
