"""Gram forms, wedge powers, hyperpfaffians and the tau-polynomial."""

from __future__ import annotations

import hashlib
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .exact_core import BudgetError, ContractError, SparseForm, hodge_star, top_pairing, wedge
from .moments import MomentSequence, shift_by_polynomial
from .spine import SpineContext, build_spine, mask_momentum

SCHEMA_VERSION = 1
DEFAULT_MAX_TERMS = 5_000_000


class CacheError(RuntimeError):
    """A cache file failed its checksum or schema check."""


@dataclass
class WedgeStats:
    """Work counters filled in by :func:`wedge_power` and the spine strategy."""

    pair_ops: int = 0
    peak_terms: int = 0
    peak_multisets: int = 0
    pruned: int = 0
    steps: list[int] = field(default_factory=list)

    def record(self, form: SparseForm, pairs: int):
        self.pair_ops += pairs
        self.steps.append(len(form))
        self.peak_terms = max(self.peak_terms, len(form))


@dataclass(frozen=True)
class GramForm:
    context: SpineContext
    coeffs: dict[int, Any]

    def __post_init__(self):
        P = self.context.P
        bad = [j for j, v in self.coeffs.items() if v != 0 and abs(j) > P]
        if bad:
            raise ContractError(f"Gram coefficients outside [-{P}, {P}]: {bad}")

    @classmethod
    def from_moments(cls, ctx: SpineContext, m: MomentSequence) -> "GramForm":
        return cls(ctx, {j: m.at(ctx, j) for j in range(-ctx.P, ctx.P + 1)})

    def realize(self) -> SparseForm:
        basis = build_spine(self.context)
        terms: dict[int, Any] = {}
        for j, c in self.coeffs.items():
            if c == 0:
                continue
            for k, w in basis[j].terms.items():
                terms[k] = c * w
        return SparseForm(self.context.L, self.context.dim, terms)

    @property
    def support(self) -> tuple[int, int]:
        js = [j for j, v in self.coeffs.items() if v != 0]
        return (min(js), max(js)) if js else (0, 0)


def _band_keep(ctx: SpineContext, band, support, remaining: int):
    lo, hi = band
    jmin, jmax = support
    qlo, qhi = lo - remaining * jmax, hi - remaining * jmin

    def keep(mask: int) -> bool:
        return qlo <= mask_momentum(mask, ctx) <= qhi

    return keep


def _form_support(f: SparseForm, ctx: SpineContext) -> tuple[int, int]:
    moms = {mask_momentum(k, ctx) for k in f.terms}
    return (min(moms), max(moms)) if moms else (0, 0)


def choose_strategy(f: SparseForm, M: int) -> str:
    """Pick iterated vs squaring from a pair-count estimate.

    Squaring pays off once intermediate powers stay much sparser than the
    ``len(f)**2`` products they replace, which in practice means ``M >= 4``
    and a dense ``f``.
    """
    if M < 4 or len(f) < 64:
        return "iterated"
    return "squaring"


def wedge_power(
    f: SparseForm,
    M: int,
    strategy: str = "auto",
    band: tuple[int, int] | None = None,
    ctx: SpineContext | None = None,
    stats: WedgeStats | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SparseForm:
    """``f^{^M}`` (not divided by ``M!``).

    With ``band`` (and ``ctx``), blades whose momentum can no longer reach
    ``band`` with the remaining factors are dropped along the way; the final
    result is restricted to the band. Unfiltered components of the result are
    therefore not meaningful, filtered ones are exact.
    """
    if M < 0:
        raise ContractError("negative wedge power")
    if M * f.degree > f.dim:
        raise ContractError(f"degree overflow: {M} x {f.degree} > {f.dim}")
    if M == 0:
        return SparseForm.scalar(1, f.dim)
    if band is not None and ctx is None:
        raise ContractError("momentum band needs a SpineContext")
    stats = stats if stats is not None else WedgeStats()
    if strategy == "auto":
        strategy = choose_strategy(f, M)
    support = _form_support(f, ctx) if band is not None else None

    def keep_for(done: int):
        if band is None:
            return None
        return _band_keep(ctx, band, support, M - done)

    def mul(a: SparseForm, b: SparseForm, done: int) -> SparseForm:
        out = wedge(a, b, keep=keep_for(done))
        stats.record(out, len(a) * len(b))
        if len(out) > max_terms:
            raise BudgetError(f"wedge power intermediate has {len(out)} terms (budget {max_terms})")
        return out

    if band is not None:
        keep = keep_for(1)
        start = SparseForm(f.degree, f.dim, {k: v for k, v in f.terms.items() if keep(k)}, f.dual)
    else:
        start = f

    if strategy == "iterated":
        acc = start
        for done in range(2, M + 1):
            acc = mul(acc, f, done)
        return acc
    if strategy == "squaring":
        # binary powering; `done` tracks how many factors each partial holds
        result, rdone = None, 0
        base, bdone = f, 1
        n = M
        while n:
            if n & 1:
                if result is None:
                    result, rdone = base, bdone
                else:
                    rdone += bdone
                    result = mul(result, base, rdone)
            n >>= 1
            if n:
                bdone *= 2
                base = mul(base, base, bdone) if band is None else wedge(base, base)
                if band is not None:
                    stats.record(base, 0)
        if band is not None:
            keep = _band_keep(ctx, band, support, 0)
            result = SparseForm(result.degree, result.dim, {k: v for k, v in result.terms.items() if keep(k)})
        return result
    raise ContractError(f"unknown strategy {strategy!r}")


def hyperpfaffian(gram: GramForm, strategy: str = "auto", stats: WedgeStats | None = None):
    """``PF(gamma) = *(gamma^{^M}) / M!``."""
    ctx = gram.context
    M = ctx.N
    if strategy == "spine":
        return tau_polynomial(ctx).evaluate(lambda j: gram.coeffs.get(j, 0))
    if strategy == "pruned":
        val = _spine_dfs(ctx, lambda j: gram.coeffs.get(j, 0), stats)
        return val
    band = None
    if strategy == "filtered":
        band, strategy = (0, 0), "iterated"
    top = wedge_power(gram.realize(), M, strategy, band=band, ctx=ctx, stats=stats)
    return _div(hodge_star(top), math.factorial(M))


def _div(value, n: int):
    if isinstance(value, int):
        return Fraction(value, n)
    if isinstance(value, float):
        return value / n
    return value * Fraction(1, n)


def _multiset_weight(js) -> int:
    out = 1
    for c in Counter(js).values():
        out *= math.factorial(c)
    return out


def _spine_dfs(ctx: SpineContext, coeff: Callable[[int], Any] | None, stats: WedgeStats | None):
    """Enumerate zero-sum sorted momentum multisets with their wedge constants.

    A prefix ``j_1 <= ... <= j_k`` with sum ``q`` survives only if some
    nondecreasing completion in ``[-P, P]`` sums to zero. With ``coeff=None``
    returns ``{multiset: C_j}``; otherwise the evaluated sum
    ``sum C_j / prod(mult!) * prod coeff(j)``.
    """
    basis = build_spine(ctx)
    P, M = ctx.P, ctx.N
    stats = stats if stats is not None else WedgeStats()
    level_counts = [0] * (M + 1)
    table: dict[tuple[int, ...], int] = {}
    total = [0]

    def emit(js, c):
        if c == 0:
            return
        if coeff is None:
            table[js] = c
        else:
            v = Fraction(c, _multiset_weight(js))
            for j in js:
                v = v * coeff(j)
            total[0] = total[0] + v

    def rec(prefix: tuple[int, ...], form: SparseForm | None, q: int):
        k = len(prefix)
        rem = M - k
        if rem == 1:
            j = -q
            if prefix and j < prefix[-1] or abs(j) > P:
                return
            level_counts[M] += 1
            stats.pair_ops += min(len(form), len(basis[j])) if form is not None else 1
            if form is None:
                c = hodge_star(basis[j])
            else:
                c = top_pairing(form, basis[j])
            emit(prefix + (j,), c)
            return
        start = prefix[-1] if prefix else -P
        for j in range(start, P + 1):
            if q + rem * j > 0:
                break
            if q + j + (rem - 1) * P < 0:
                continue
            e = basis[j]
            if form is None:
                new = e
            else:
                new = wedge(form, e)
                stats.record(new, len(form) * len(e))
            if not new:
                stats.pruned += 1
                continue
            level_counts[k + 1] += 1
            rec(prefix + (j,), new, q + j)

    rec((), None, 0)
    stats.peak_multisets = max(stats.peak_multisets, max(level_counts))
    return table if coeff is None else total[0]


@dataclass(frozen=True)
class TauPolynomial:
    """``tau_M = sum over zero-sum multisets j of c_j prod_k m_{j_k}``.

    ``c_j`` already folds ``1/M!`` and the multiplicities:
    ``c_j = C_j / prod(mult!)``.
    """

    context: SpineContext
    terms: dict[tuple[int, ...], Fraction]

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self, values):
        """``values`` is a MomentSequence (read with this context's centering) or ``j -> scalar``."""
        if isinstance(values, MomentSequence):
            m = values
            ctx = self.context
            values = lambda j: m.at(ctx, j)  # noqa: E731
        cache: dict[int, Any] = {}
        total = 0
        for js, c in self.terms.items():
            v = c
            for j in js:
                if j not in cache:
                    cache[j] = values(j)
                v = v * cache[j]
            total = total + v
        return total

    def derivative(self, values, k: int):
        """Formal ``d_k tau``: Leibniz rule with ``d_k m_j = m_{j+k}``."""
        if isinstance(values, MomentSequence):
            m = values
            ctx = self.context
            values = lambda j: m.at(ctx, j)  # noqa: E731
        total = 0
        for js, c in self.terms.items():
            for i in range(len(js)):
                v = c * values(js[i] + k)
                for l, j in enumerate(js):
                    if l != i:
                        v = v * values(j)
                total = total + v
        return total

    def to_json(self) -> dict:
        values = {",".join(map(str, js)): str(c) for js, c in sorted(self.terms.items())}
        return _with_digest({"schema": SCHEMA_VERSION, "L": self.context.L, "M": self.context.N, "kind": "tau", "values": values})

    @classmethod
    def from_json(cls, data: dict) -> "TauPolynomial":
        _verify(data, "tau")
        terms = {tuple(int(x) for x in k.split(",")): Fraction(v) for k, v in data["values"].items()}
        return cls(SpineContext(data["L"], data["M"]), terms)


_TAU_CACHE: dict[SpineContext, TauPolynomial] = {}


def tau_polynomial(ctx: SpineContext, stats: WedgeStats | None = None) -> TauPolynomial:
    if ctx in _TAU_CACHE and stats is None:
        return _TAU_CACHE[ctx]
    consts = _spine_dfs(ctx, None, stats)
    terms = {js: Fraction(c, _multiset_weight(js)) for js, c in consts.items()}
    tp = TauPolynomial(ctx, terms)
    _TAU_CACHE[ctx] = tp
    return tp


def structure_constant(js, ctx: SpineContext, shortcut: bool = True):
    """``C_j = *(eps_{j_1} ^ ... ^ eps_{j_M})`` for ``len(js) == ctx.N``.

    With ``shortcut`` the selection rule short-circuits nonzero momentum sums.
    """
    js = tuple(js)
    if len(js) != ctx.N:
        raise ContractError(f"need {ctx.N} momenta, got {len(js)}")
    if shortcut and sum(js) != 0:
        return 0
    basis = build_spine(ctx)
    if any(abs(j) > ctx.P for j in js):
        return 0
    acc = basis[js[0]]
    for j in js[1:-1]:
        acc = wedge(acc, basis[j])
        if not acc:
            return 0
    if len(js) == 1:
        return hodge_star(acc)
    return top_pairing(acc, basis[js[-1]])


@dataclass(frozen=True)
class PairConstantTable:
    """``D_p = *(eps_p ^ eps_{-p} ^ eps_0^{^(M-2)})`` for ``0 <= p <= P`` (``D_{-p} = D_p``)."""

    context: SpineContext
    values: dict[int, int]

    def __getitem__(self, p: int) -> int:
        return self.values.get(abs(p), 0)

    def to_json(self) -> dict:
        values = {str(p): str(v) for p, v in sorted(self.values.items())}
        return _with_digest(
            {"schema": SCHEMA_VERSION, "L": self.context.L, "M": self.context.N, "kind": "pair_constants", "values": values}
        )

    @classmethod
    def from_json(cls, data: dict) -> "PairConstantTable":
        _verify(data, "pair_constants")
        return cls(SpineContext(data["L"], data["M"]), {int(k): int(v) for k, v in data["values"].items()})

    @property
    def digest(self) -> str:
        return self.to_json()["digest"]


def _pair_constant(args):
    p, eps_p, eps_mp, background = args
    return p, top_pairing(wedge(eps_p, eps_mp), background)


def pair_constants_circular(ctx: SpineContext, threads: int = 1, stats: WedgeStats | None = None) -> PairConstantTable:
    if ctx.N < 2:
        raise ContractError("pair constants need at least two particles")
    basis = build_spine(ctx)
    background = wedge_power(basis[0], ctx.N - 2, "iterated", stats=stats)
    jobs = [(p, basis[p], basis[-p], background) for p in range(ctx.P + 1)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = dict(ex.map(_pair_constant, jobs))
    else:
        results = dict(map(_pair_constant, jobs))
    return PairConstantTable(ctx, {p: results[p] for p in sorted(results)})


def tau_derivative(ctx: SpineContext, m: MomentSequence, k: int):
    """``d_k tau = *(d_k gamma ^ gamma^{^(M-1)}) / (M-1)!`` (wedge route)."""
    gamma = GramForm.from_moments(ctx, m).realize()
    dgamma = GramForm.from_moments(ctx, m.shifted(k)).realize()
    rest = wedge_power(gamma, ctx.N - 1, "iterated")
    return _div(top_pairing(dgamma, rest), math.factorial(ctx.N - 1))


def lifted_apply(q: dict[int, Any], ctx: SpineContext, m: MomentSequence, strategy: str = "auto"):
    """``PF(Q(d)[gamma])`` with ``Q(x) = sum_k q_k x^k``."""
    return hyperpfaffian(GramForm.from_moments(ctx, shift_by_polynomial(m, q)), strategy)


def _canonical(data: dict) -> bytes:
    body = {k: v for k, v in data.items() if k != "digest"}
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()


def _with_digest(data: dict) -> dict:
    data["digest"] = hashlib.sha256(_canonical(data)).hexdigest()
    return data


def _verify(data: dict, kind: str):
    if data.get("schema") != SCHEMA_VERSION:
        raise CacheError(f"unsupported cache schema {data.get('schema')!r}")
    if data.get("kind") != kind:
        raise CacheError(f"expected kind {kind!r}, found {data.get('kind')!r}")
    if data.get("digest") != hashlib.sha256(_canonical(data)).hexdigest():
        raise CacheError("cache checksum mismatch")


def default_cache_dir() -> Path:
    env = os.environ.get("SPINEKIT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "spinekit"


def cache_path(cache_dir: Path, L: int, M: int, kind: str) -> Path:
    return Path(cache_dir) / f"{kind}_L{L}_M{M}.json"


def save_table(table: TauPolynomial | PairConstantTable, cache_dir: Path | None = None) -> Path:
    cache_dir = Path(cache_dir or default_cache_dir())
    cache_dir.mkdir(parents=True, exist_ok=True)
    data = table.to_json()
    path = cache_path(cache_dir, data["L"], data["M"], data["kind"])
    path.write_text(json.dumps(data, indent=1))
    return path


def load_table(L: int, M: int, kind: str, cache_dir: Path | None = None):
    """Load a cached table, or return None when absent. Raises CacheError on corruption."""
    path = cache_path(Path(cache_dir or default_cache_dir()), L, M, kind)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CacheError(f"{path}: not valid JSON ({exc})") from None
    cls = TauPolynomial if kind == "tau" else PairConstantTable
    return cls.from_json(data)
