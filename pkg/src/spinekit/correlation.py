"""m-point correlation functions and the circular two-point curve."""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import mpmath
import numpy as np

from .exact_core import ContractError, SparseForm, hodge_star, to_scalar, top_pairing, wedge
from .moments import MomentSequence, poly_from_roots, shift_by_polynomial
from .spine import SpineContext, wronskian_blade
from .tau import GramForm, PairConstantTable, hyperpfaffian, pair_constants_circular, wedge_power

CURVE_SCHEMA = 1


@dataclass(frozen=True)
class CorrelationRequest:
    context: SpineContext
    points: tuple
    provider: MomentSequence
    route: str = "both"

    def __post_init__(self):
        if len(self.points) > self.context.N:
            raise ContractError(f"m = {len(self.points)} exceeds M = {self.context.N}")
        if self.route not in ("direct", "miwa", "both"):
            raise ContractError(f"unknown route {self.route!r}")


def correlation_direct(ctx: SpineContext, points, provider: MomentSequence | None = None):
    """``*(omega(y_1) ^ ... ^ omega(y_m) ^ gamma^{^(M-m)}) / (M-m)!`` (unnormalised)."""
    pts = [to_scalar(y) for y in points]
    m, M = len(pts), ctx.N
    if m > M:
        raise ContractError(f"m = {m} exceeds M = {M}")
    if m < M and provider is None:
        raise ContractError("a moment provider is needed when m < M")
    acc = SparseForm.scalar(1, ctx.dim)
    for y in pts:
        acc = wedge(acc, wronskian_blade(y, ctx))
    if m == M:
        return hodge_star(acc)
    gamma = GramForm.from_moments(ctx, provider).realize()
    bg = wedge_power(gamma, M - m, "iterated")
    val = top_pairing(acc, bg) if m else hodge_star(bg)
    return Fraction(val, math.factorial(M - m)) if isinstance(val, int) else val / math.factorial(M - m)


def miwa_times_weight(points, beta: int) -> dict[int, Any]:
    """Polynomial ``prod_i (1 - x/y_i)^beta`` = ``exp(xi(x, -beta sum_i [y_i^-1]))``."""
    pts = [to_scalar(y) for y in points]
    if any(y == 0 for y in pts):
        raise ContractError("Miwa shift needs nonzero points")
    scale = 1
    for y in pts:
        scale *= Fraction(-1, 1) / y if not isinstance(y, float) else -1.0 / y
    coeffs = poly_from_roots(pts, beta)
    factor = scale**beta
    return {k: c * factor for k, c in coeffs.items()}


def correlation_miwa(ctx: SpineContext, points, provider: MomentSequence, heine: bool = True):
    """``prod (y_j-y_i)^beta * tau_{M-m}(t_y) / tau_M(0)`` with ``t_y = -beta sum [y_i^-1]``.

    With ``heine=True`` the Miwa side carries ``prod_i y_i^{beta (M-m)}``, the
    factor relating ``(1 - x/y)^beta`` to ``(x - y)^beta``. Without it the ratio
    to :func:`correlation_direct` is that product, not a constant.
    """
    pts = [to_scalar(y) for y in points]
    m, M = len(pts), ctx.N
    if m > M:
        raise ContractError(f"m = {m} exceeds M = {M}")
    beta = ctx.beta
    vdm = 1
    for a, b in itertools.combinations(pts, 2):
        vdm *= (b - a) ** beta
    tau_M = hyperpfaffian(GramForm.from_moments(ctx, provider))
    if m == M:
        inner = 1
    else:
        small = ctx.with_N(M - m)
        weighted = shift_by_polynomial(provider, miwa_times_weight(pts, beta)) if m else provider
        inner = hyperpfaffian(GramForm.from_moments(small, weighted))
    pref = 1
    if heine:
        for y in pts:
            pref *= y ** (beta * (M - m))
    return vdm * pref * inner / tau_M


def correlation_operator(ctx: SpineContext, points, provider: MomentSequence):
    """``prod (y_j-y_i)^beta * Qhat_y[tau_{M-m}]`` with ``Q_y(x) = prod (x - y_i)^beta``."""
    from .tau import lifted_apply

    pts = [to_scalar(y) for y in points]
    m, M = len(pts), ctx.N
    vdm = 1
    for a, b in itertools.combinations(pts, 2):
        vdm *= (b - a) ** ctx.beta
    if m == M:
        return vdm
    return vdm * lifted_apply(poly_from_roots(pts, ctx.beta), ctx.with_N(M - m), provider)


def correlation(req: CorrelationRequest) -> dict:
    out = {}
    if req.route in ("direct", "both"):
        out["direct"] = correlation_direct(req.context, req.points, req.provider)
    if req.route in ("miwa", "both"):
        out["miwa"] = correlation_miwa(req.context, req.points, req.provider)
    if req.route == "both" and out["miwa"] != 0:
        out["ratio"] = Fraction(out["direct"]) / Fraction(out["miwa"])
    return out


def cos_to_sin2(D: dict[int, Any], P: int) -> list[Fraction]:
    """Rewrite ``D_0 + 2 sum_{p>0} D_p cos(p theta)`` as a polynomial in ``s = sin^2(theta/2)``.

    Uses ``cos(p theta) = T_p(1 - 2s)``. The low-order coefficients vanish for
    a curve with a high-order zero at ``theta = 0``, which keeps float
    evaluation near coincidence free of cancellation.
    """
    # Chebyshev T_p in the variable c, then substitute c = 1 - 2s
    T = [[1], [0, 1]]
    for p in range(2, P + 1):
        nxt = [0] * (p + 1)
        for i, c in enumerate(T[p - 1]):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(T[p - 2]):
            nxt[i] -= c
        T.append(nxt)
    in_c = [Fraction(0)] * (P + 1)
    for p in range(P + 1):
        w = D.get(p, 0) * (1 if p == 0 else 2)
        for i, c in enumerate(T[p]):
            in_c[i] += w * c
    out = [Fraction(0)] * (P + 1)
    for i, c in enumerate(in_c):
        if not c:
            continue
        # (1 - 2s)^i
        for r in range(i + 1):
            out[r] += c * math.comb(i, r) * (-2) ** r
    return out


@dataclass
class CorrelationCurve:
    """Circular ``R_2(theta) = (C(M,2) / (pi D_0)) * sum_p D_p e^{i p theta}``.

    ``normalization`` is the exact rational ``C(M,2)/D_0``; the curve carries an
    extra ``1/pi`` because ``int_0^pi e^{i p theta} d theta`` vanishes for even
    ``p != 0`` and pairs off for odd ``p``, leaving ``pi D_0``.
    """

    L: int
    M: int
    fourier: dict[int, Any]
    normalization: Any
    exact: bool = True
    sin2_poly: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.sin2_poly and self.exact:
            self.sin2_poly = cos_to_sin2(self.fourier, max(self.fourier))

    @property
    def P(self) -> int:
        return max(self.fourier)

    def integral_over_half_period(self):
        """``int_0^pi R_2 dtheta`` from the Fourier table (exact when the table is).

        Each ``2 D_p cos(p theta)`` integrates to ``2 D_p sin(p pi)/p = 0``.
        """
        return self.normalization * self.fourier[0]

    def value_at_zero(self):
        """``R_2(0) * pi`` exactly: ``normalization * (D_0 + 2 sum D_p)``."""
        return self.normalization * (self.fourier[0] + 2 * sum(d for p, d in self.fourier.items() if p))

    def zero_order(self) -> int | None:
        """Order of the zero at ``theta = 0`` (in powers of theta); None for float tables."""
        if not self.exact:
            return None
        for r, c in enumerate(self.sin2_poly):
            if c != 0:
                return 2 * r
        return -1

    def evaluate(self, theta) -> np.ndarray:
        """``R_2`` on an array of angles.

        Exact tables are summed in high precision: near ``theta = 0`` the curve
        is ``O(theta^{L^2})`` while the ``D_p`` are ~``10^24``, so double
        precision cosine sums there are pure rounding noise.
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        items = sorted(self.fourier.items())
        if not self.exact:
            acc = np.zeros_like(theta)
            for p, d in items:
                acc += (1.0 if p == 0 else 2.0) * float(d) * np.cos(p * theta)
            return float(self.normalization) * acc / np.pi
        fr = {p: Fraction(d) * (1 if p == 0 else 2) for p, d in items}
        digits = max(len(str(abs(v.numerator))) + len(str(v.denominator)) for v in fr.values())
        P = max(fr)
        with mpmath.workdps(digits + 60):
            coeffs = [mpmath.mpf(fr.get(p, 0).numerator) / fr.get(p, Fraction(1)).denominator for p in range(P + 1)]
            norm = Fraction(self.normalization)
            scale = mpmath.mpf(norm.numerator) / norm.denominator / mpmath.pi
            out = np.empty_like(theta)
            for i, t in enumerate(theta):
                c1 = mpmath.cos(mpmath.mpf(float(t)))
                # cos(p t) by the Chebyshev recurrence
                prev, cur = mpmath.mpf(1), c1
                acc = coeffs[0] + (coeffs[1] * c1 if P >= 1 else 0)
                two_c = 2 * c1
                for p in range(2, P + 1):
                    prev, cur = cur, two_c * cur - prev
                    acc += coeffs[p] * cur
                out[i] = float(scale * acc)
        return out

    def digest(self) -> str:
        body = ";".join(f"{p}:{self.fourier[p]}" for p in sorted(self.fourier))
        return hashlib.sha256(body.encode()).hexdigest()

    def _noise_floor(self, r: np.ndarray, rel_floor: float | None) -> float:
        if rel_floor is None:
            rel_floor = 0.0 if self.exact else 1e-9
        return rel_floor * float(np.max(np.abs(r)))

    def local_maxima(self, grid_size: int, rel_floor: float | None = None) -> list[float]:
        """Interior grid maxima on ``[0, pi]``; float curves ignore values under a noise floor."""
        th = np.linspace(0, np.pi, grid_size)
        r = self.evaluate(th)
        floor = self._noise_floor(r, rel_floor)
        idx = np.where((r[1:-1] > r[:-2]) & (r[1:-1] > r[2:]) & (r[1:-1] > floor))[0] + 1
        return [float(th[i]) for i in idx]

    def local_minima(self, grid_size: int, rel_floor: float | None = None) -> list[float]:
        th = np.linspace(0, np.pi, grid_size)
        r = self.evaluate(th)
        floor = self._noise_floor(r, rel_floor)
        idx = np.where((r[1:-1] < r[:-2]) & (r[1:-1] < r[2:]) & (r[1:-1] > floor))[0] + 1
        return [float(th[i]) for i in idx]


def circular_pair_curve(L: int, M: int, table: PairConstantTable | None = None, threads: int = 1) -> CorrelationCurve:
    ctx = SpineContext(L, M)
    if table is None:
        table = pair_constants_circular(ctx, threads=threads)
    if (table.context.L, table.context.N) != (L, M):
        raise ContractError("pair table does not match (L, M)")
    D = dict(table.values)
    return CorrelationCurve(L, M, D, Fraction(math.comb(M, 2), D[0]))


def circular_pair_curve_float(L: int, M: int, grid: int | None = None) -> CorrelationCurve:
    """Inexact curve from float quadrature Fourier coefficients (large ``L`` path)."""
    from .oracle import pair_fourier_float

    D = pair_fourier_float(L, M, grid=grid)
    d0 = D[0]
    scaled = {p: v / d0 for p, v in D.items()}
    return CorrelationCurve(L, M, scaled, float(math.comb(M, 2)), exact=False)


def emit_curve(curve: CorrelationCurve, grid_size: int, path: str | Path) -> Path:
    if grid_size < 2:
        raise ContractError("grid_size must be at least 2")
    path = Path(path)
    th = np.linspace(0, np.pi, grid_size)
    r = curve.evaluate(th)
    with path.open("w", newline="") as fh:
        fh.write(f"# schema={CURVE_SCHEMA}\n")
        fh.write(f"# L={curve.L} M={curve.M} beta={curve.L * curve.L} exact={curve.exact}\n")
        fh.write(f"# normalization=({curve.normalization})/pi integral_0^pi={curve.integral_over_half_period()}\n")
        fh.write(f"# fourier_digest={curve.digest()}\n")
        w = csv.writer(fh)
        w.writerow(["theta", "R2"])
        for t, v in zip(th, r):
            w.writerow([repr(float(t)), repr(float(v))])
    return path
