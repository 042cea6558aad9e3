"""Wronskian blades and the momentum-sector basis of Lambda^L V.

For charge ``L`` particles in ``V = span(e_0, ..., e_{LN-1})`` the blade
``omega(x)`` has coordinate ``Wr(x^{u_1}, ..., x^{u_L})`` on ``e_u``. That
coordinate is ``Delta_u * x^{P + p_u}`` with ``p_u = sum(u) - sigma_bar``, so
grouping blades by momentum gives ``omega(x) = sum_j x^{P+j} eps_j``.

Normalisation: the derivative blades are taken as Taylor coefficients
``v^{(k)}/k!``. That divides every coordinate by ``sf(L-1) = 0! 1! ... (L-1)!``,
which is the constant that makes ``*(omega(x_1)^...^omega(x_N))`` equal to
``prod_{i<j} (x_j - x_i)^{L^2}`` on the nose for every even ``L``. For
``L = 2`` the factor is 1. The rescaled weight ``Delta_u / sf(L-1)`` equals
``det[binom(u_b, a)]`` and is always an integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .exact_core import BudgetError, ContractError, SparseForm, hodge_star, mask_of, to_scalar, wedge

DEFAULT_MAX_BLADES = 2_000_000


@dataclass(frozen=True)
class SpineContext:
    L: int
    N: int

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 2 or self.L % 2:
            raise ContractError(f"L must be an even integer >= 2, got {self.L!r}")
        if not isinstance(self.N, int) or self.N < 1:
            raise ContractError(f"N must be a positive integer, got {self.N!r}")
        if self.dim > 64:
            raise ContractError(f"dimV = {self.dim} exceeds 64")

    @property
    def dim(self) -> int:
        return self.L * self.N

    @property
    def sigma_bar(self) -> int:
        return self.L * (self.L * self.N - 1) // 2

    @property
    def P(self) -> int:
        return self.L * self.L * (self.N - 1) // 2

    @property
    def beta(self) -> int:
        return self.L * self.L

    @property
    def n_sectors(self) -> int:
        return 2 * self.P + 1

    @property
    def n_blades(self) -> int:
        return math.comb(self.dim, self.L)

    def with_N(self, N: int) -> "SpineContext":
        return SpineContext(self.L, N)


def superfactorial(n: int) -> int:
    """``0! * 1! * ... * n!``."""
    out = 1
    for k in range(n + 1):
        out *= math.factorial(k)
    return out


def momentum(u, ctx: SpineContext) -> int:
    """Recentered index sum of an ``L``-blade (indices tuple or mask)."""
    idx = _indices(u)
    if len(idx) != ctx.L:
        raise ContractError(f"momentum needs a degree-{ctx.L} blade, got {idx}")
    return sum(idx) - ctx.sigma_bar


def mask_momentum(mask: int, ctx: SpineContext) -> int:
    """Momentum of a blade of any degree divisible by ``L``."""
    n = mask.bit_count()
    if n % ctx.L:
        raise ContractError("blade degree not a multiple of L")
    s = 0
    while mask:
        low = mask & -mask
        s += low.bit_length() - 1
        mask ^= low
    return s - (n // ctx.L) * ctx.sigma_bar


def _indices(u) -> tuple[int, ...]:
    if isinstance(u, int):
        from .exact_core import indices_of

        return indices_of(u)
    if hasattr(u, "indices"):
        return tuple(u.indices)
    return tuple(u)


def vandermonde_weight(u) -> int:
    idx = _indices(u)
    if not idx:
        raise ContractError("vandermonde_weight needs at least one index")
    out = 1
    for a, b in itertools.combinations(idx, 2):
        out *= b - a
    return out


@dataclass(frozen=True)
class SpineBasis:
    context: SpineContext
    eps: dict[int, SparseForm]
    normalization: int = 1
    sizes: dict[int, int] = field(default_factory=dict)

    @property
    def momentum_range(self) -> tuple[int, int]:
        return -self.context.P, self.context.P

    def __getitem__(self, j: int) -> SparseForm:
        if j in self.eps:
            return self.eps[j]
        return SparseForm.zero(self.context.L, self.context.dim)

    def summary(self) -> dict:
        ctx = self.context
        return {
            "L": ctx.L,
            "N": ctx.N,
            "dimV": ctx.dim,
            "beta": ctx.beta,
            "P": ctx.P,
            "sigma_bar": ctx.sigma_bar,
            "blades": ctx.n_blades,
            "sectors": len(self.eps),
            "sector_sizes": {str(j): self.sizes[j] for j in sorted(self.sizes)},
        }


def build_spine(ctx: SpineContext, max_blades: int = DEFAULT_MAX_BLADES) -> SpineBasis:
    if ctx.n_blades > max_blades:
        raise BudgetError(
            f"spine for (L={ctx.L}, N={ctx.N}) has {ctx.n_blades} blades, budget is {max_blades}"
        )
    return _build_spine(ctx)


@lru_cache(maxsize=32)
def _build_spine(ctx: SpineContext) -> SpineBasis:
    norm = superfactorial(ctx.L - 1)
    sectors: dict[int, dict[int, int]] = {}
    for u in itertools.combinations(range(ctx.dim), ctx.L):
        j = sum(u) - ctx.sigma_bar
        w, r = divmod(vandermonde_weight(u), norm)
        assert r == 0
        sectors.setdefault(j, {})[mask_of(u)] = w
    eps = {j: SparseForm(ctx.L, ctx.dim, sectors[j]) for j in sorted(sectors)}
    return SpineBasis(ctx, eps, norm, {j: len(sectors[j]) for j in sorted(sectors)})


def wronskian_blade(x, ctx: SpineContext) -> SparseForm:
    """``omega(x) = sum_j x^{P+j} eps_j``."""
    x = to_scalar(x)
    basis = build_spine(ctx)
    terms = {}
    for j, e in basis.eps.items():
        c = x ** (ctx.P + j)
        if c == 0:
            continue
        for k, w in e.terms.items():
            terms[k] = c * w
    return SparseForm(ctx.L, ctx.dim, terms)


def wronskian_blade_direct(x, ctx: SpineContext) -> SparseForm:
    """``omega(x)`` as the wedge of Taylor vectors ``v^{(k)}(x)/k!``, k < L.

    Independent of the spine basis; kept as a cross-check.
    """
    x = to_scalar(x)
    out = None
    for k in range(ctx.L):
        terms = {}
        for n in range(k, ctx.dim):
            c = math.comb(n, k) * x ** (n - k)
            if c != 0:
                terms[1 << n] = c
        vec = SparseForm(1, ctx.dim, terms)
        out = vec if out is None else wedge(out, vec)
    return out


@dataclass(frozen=True)
class VandermondeReport:
    L: int
    points: tuple
    lhs: object
    rhs: object

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def vandermonde_rhs(points, L: int):
    out = 1
    for a, b in itertools.combinations(points, 2):
        out *= (b - a) ** (L * L)
    return out


def vandermonde_check(points, ctx: SpineContext) -> VandermondeReport:
    pts = tuple(to_scalar(p) for p in points)
    if len(pts) != ctx.N:
        raise ContractError(f"need {ctx.N} points, got {len(pts)}")
    acc = wronskian_blade(pts[0], ctx)
    for p in pts[1:]:
        acc = wedge(acc, wronskian_blade(p, ctx))
    return VandermondeReport(ctx.L, pts, hodge_star(acc), vandermonde_rhs(pts, ctx.L))
