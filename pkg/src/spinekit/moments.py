"""Moment sequences and the time actions on them.

Providers are indexed by ABSOLUTE power ``n`` (the moment ``int x^n dmu``).
A context with ``N`` particles reads its recentered moment ``m_j`` at
``n = P_N + j``. With this convention the ``N-1``, ``N`` and ``N+1`` particle
systems built on one measure stay mutually consistent.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .exact_core import BudgetError, ContractError, LaurentPoly
from .spine import SpineContext


class RangeError(BudgetError):
    """A moment lookup fell outside the provider's valid range."""


class MomentPoly:
    """Sparse polynomial in formal moment symbols ``m<n>`` (absolute ``n``).

    Monomials are sorted tuples of absolute indices; coefficients are exact.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], Any] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def symbol(cls, n: int) -> "MomentPoly":
        return cls({(n,): 1})

    @classmethod
    def const(cls, c) -> "MomentPoly":
        return cls({(): c})

    def _coerce(self, other) -> "MomentPoly":
        if isinstance(other, MomentPoly):
            return other
        return MomentPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return MomentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return MomentPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MomentPoly):
            if other == 0:
                return MomentPoly()
            return MomentPoly({k: v * other for k, v in self.terms.items()})
        acc: dict[tuple[int, ...], Any] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(sorted(a + b))
                acc[k] = acc.get(k, 0) + ca * cb
        return MomentPoly(acc)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, MomentPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {(): other}

    def __ne__(self, other) -> bool:
        return not self == other

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def evaluate(self, lookup: Callable[[int], Any]):
        total = 0
        for mono, c in self.terms.items():
            v = c
            for n in mono:
                v = v * lookup(n)
            total = total + v
        return total

    def shift(self, k: int) -> "MomentPoly":
        """Apply ``d/dt_k`` (Leibniz rule; each factor ``m<n>`` becomes ``m<n+k>``)."""
        acc: dict[tuple[int, ...], Any] = {}
        for mono, c in self.terms.items():
            for i in range(len(mono)):
                new = tuple(sorted(mono[:i] + (mono[i] + k,) + mono[i + 1 :]))
                acc[new] = acc.get(new, 0) + c
        return MomentPoly(acc)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            sym = "*".join(f"m<{n}>" for n in mono) or "1"
            parts.append(f"{self.terms[mono]}*{sym}")
        return " + ".join(parts)


@dataclass(frozen=True)
class MomentSequence:
    """Absolute-power moment functional ``n -> m<n>``.

    ``valid_range`` is an inclusive ``(lo, hi)``; ``None`` bounds are open.
    """

    kind: str
    lookup_fn: Callable[[int], Any] = field(repr=False)
    valid_range: tuple[int | None, int | None] = (None, None)
    exact: bool = True

    def __call__(self, n: int):
        lo, hi = self.valid_range
        if (lo is not None and n < lo) or (hi is not None and n > hi):
            raise RangeError(f"moment m<{n}> outside valid range {self.valid_range} ({self.kind})")
        return self.lookup_fn(n)

    lookup = __call__

    def at(self, ctx: SpineContext, j: int):
        """Recentered moment ``m_j`` for the ``ctx.N``-particle system."""
        return self(ctx.P + j)

    def shifted(self, k: int) -> "MomentSequence":
        return derivative_shift(self, k)


def derivative_shift(m: MomentSequence, k: int) -> MomentSequence:
    """``(d_k m)<n> = m<n+k>``: multiplying the measure by ``x^k``."""
    lo, hi = m.valid_range
    rng = (None if lo is None else lo - k, None if hi is None else hi - k)
    fn = m.lookup_fn
    return MomentSequence(m.kind, lambda n: fn(n + k), rng, m.exact)


def provider_table(values: dict[int, Any], valid_range: tuple[int, int] | None = None) -> MomentSequence:
    vals = {int(n): Fraction(v) if not isinstance(v, (int, Fraction)) else v for n, v in values.items()}
    if valid_range is None:
        valid_range = (min(vals), max(vals)) if vals else (0, -1)

    def fn(n):
        try:
            return vals[n]
        except KeyError:
            raise RangeError(f"moment m<{n}> not in table") from None

    return MomentSequence("rational-table", fn, valid_range, True)


def provider_formal(valid_range: tuple[int | None, int | None] = (None, None)) -> MomentSequence:
    return MomentSequence("formal", MomentPoly.symbol, valid_range, True)


def provider_circular(ctx: SpineContext) -> MomentSequence:
    """Haar measure on the unit circle with the phase twist absorbed.

    For even ``L`` and ``|x_i| = 1``,
    ``prod_{i<j} |x_i - x_j|^{L^2} = prod_{i<j} (x_j - x_i)^{L^2} * prod_i x_i^{-P}``,
    so the effective measure is ``x^{-P} dtheta / 2pi`` and the recentered
    moments are ``m_j = delta_{j0}``. The twist depends on ``N`` through ``P``.
    """
    center = ctx.P
    return MomentSequence("circular", lambda n: 1 if n == center else 0, (None, None), True)


def provider_gaussian(valid_range: tuple[int, int] = (0, 200)) -> MomentSequence:
    """``int x^n exp(-x^2) dx`` as floats (inexact)."""

    def fn(n):
        if n < 0:
            raise RangeError("gaussian moments need n >= 0")
        if n % 2:
            return 0.0
        return math.gamma((n + 1) / 2)

    return MomentSequence("gaussian-float", fn, valid_range, False)


def random_rational_table(lo: int, hi: int, seed: int, span: int = 9, denom: int = 7) -> MomentSequence:
    """Random exact moments on ``[lo, hi]``; a fixture for identity checks."""
    rng = random.Random(seed)
    vals = {}
    for n in range(lo, hi + 1):
        num = rng.randint(-span * denom, span * denom)
        vals[n] = Fraction(num, rng.randint(1, denom))
    return provider_table(vals, (lo, hi))


def load_moment_table(path: str | Path) -> MomentSequence:
    data = json.loads(Path(path).read_text())
    if data.get("center_convention", "absolute") != "absolute":
        raise ContractError("only absolute moment tables are supported")
    return provider_table({int(k): Fraction(v) for k, v in data["values"].items()})


def dump_moment_table(values: dict[int, Fraction], path: str | Path) -> None:
    data = {"center_convention": "absolute", "values": {str(n): str(Fraction(v)) for n, v in sorted(values.items())}}
    Path(path).write_text(json.dumps(data, indent=1))


@dataclass(frozen=True)
class TimeDeformation:
    """Finitely supported times ``t_k``; ``xi(x, t) = sum_k t_k x^k``."""

    support: dict[int, Any]

    def xi(self, x):
        return sum((t * x**k for k, t in self.support.items()), 0)


@dataclass(frozen=True)
class MiwaShift:
    """``-L^2 [z^-1]`` (insert) or ``+L^2 [z^-1]`` (remove).

    On moments the shift multiplies the measure by ``(1 - x/z)^{+-L^2}``; the
    coefficients returned are those of ``x^k z^{-k}``.
    """

    direction: str
    weight: int
    truncation_order: int | None = None

    def __post_init__(self):
        if self.direction not in ("insert", "remove"):
            raise ContractError(f"unknown Miwa direction {self.direction!r}")
        if self.direction == "remove" and self.truncation_order is None:
            raise ContractError("the positive Miwa shift is an infinite series; give truncation_order")

    def coefficients(self) -> list[int]:
        w = self.weight
        if self.direction == "insert":
            return [math.comb(w, k) * (-1) ** k for k in range(w + 1)]
        return [math.comb(w + k - 1, k) for k in range(self.truncation_order + 1)]

    def components(self, z, order: int):
        """Time vector components ``-+ w / (k z^k)`` for ``k = 1..order``."""
        sgn = -1 if self.direction == "insert" else 1
        return {k: Fraction(sgn * self.weight, k) / Fraction(z) ** k for k in range(1, order + 1)}


def _shift_series(m: MomentSequence, ctx: SpineContext, coeffs: list[int]) -> dict[int, LaurentPoly]:
    out = {}
    for j in range(-ctx.P, ctx.P + 1):
        n = ctx.P + j
        out[j] = LaurentPoly({-k: c * m(n + k) for k, c in enumerate(coeffs) if c != 0})
    return out


def miwa_insert(m: MomentSequence, ctx: SpineContext) -> dict[int, LaurentPoly]:
    """``m_j(t - L^2[z^-1]) = sum_{k<=L^2} binom(L^2,k) (-1)^k z^{-k} m_{j+k}``."""
    return _shift_series(m, ctx, MiwaShift("insert", ctx.beta).coefficients())


def miwa_remove(m: MomentSequence, ctx: SpineContext, order: int | None = None) -> dict[int, LaurentPoly]:
    """``m_j(t + L^2[z^-1])`` truncated after ``z^{-order}`` (default ``2P``)."""
    if order is None:
        order = 2 * ctx.P
    return _shift_series(m, ctx, MiwaShift("remove", ctx.beta, order).coefficients())


def shift_by_polynomial(m: MomentSequence, q: dict[int, Any]) -> MomentSequence:
    """Moments of ``Q(x) dmu`` for ``Q = sum_k q_k x^k`` (``k`` may be negative)."""
    q = {k: v for k, v in q.items() if v != 0}
    lo, hi = m.valid_range
    kmin, kmax = (min(q), max(q)) if q else (0, 0)
    rng = (None if lo is None else lo - kmin, None if hi is None else hi - kmax)

    def fn(n):
        return sum((c * m(n + k) for k, c in q.items()), 0)

    return MomentSequence(m.kind, fn, rng, m.exact)


def poly_from_roots(roots, power: int) -> dict[int, Any]:
    """Coefficients of ``prod_i (x - r_i)^power``."""
    coeffs = {0: 1}
    for r in roots:
        for _ in range(power):
            nxt: dict[int, Any] = {}
            for k, c in coeffs.items():
                nxt[k + 1] = nxt.get(k + 1, 0) + c
                nxt[k] = nxt.get(k, 0) - r * c
            coeffs = nxt
    return {k: v for k, v in coeffs.items() if v != 0}
