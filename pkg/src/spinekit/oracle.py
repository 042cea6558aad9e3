"""Brute-force ground truth, independent of the exterior-algebra code paths.

* :func:`partition_symbolic` expands ``prod_{i<j} (x_j - x_i)^{L^2}`` into
  monomials and integrates term by term.
* :func:`quadrature_circle` integrates the circular joint density on a uniform
  angle grid. The integrand is a trigonometric polynomial, so the trapezoid
  rule is exact (up to rounding) once the grid exceeds its degree.
* :func:`mc_sample` is a Metropolis demonstration, not a gate.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .exact_core import BudgetError

MAX_MONOMIALS = 10_000_000


def expand_vandermonde_power(M: int, power: int, budget: int = MAX_MONOMIALS) -> dict[tuple[int, ...], int]:
    """Monomial expansion of ``prod_{i<j} (x_j - x_i)^power`` as exponent tuple -> coefficient."""
    poly: dict[tuple[int, ...], int] = {(0,) * M: 1}
    for i, j in itertools.combinations(range(M), 2):
        factor = {}
        for k in range(power + 1):
            e = [0] * M
            e[j] = k
            e[i] = power - k
            factor[tuple(e)] = math.comb(power, k) * (-1) ** (power - k)
        nxt: dict[tuple[int, ...], int] = {}
        for a, ca in poly.items():
            for b, cb in factor.items():
                key = tuple(x + y for x, y in zip(a, b))
                nxt[key] = nxt.get(key, 0) + ca * cb
        poly = {k: v for k, v in nxt.items() if v}
        if len(poly) > budget:
            raise BudgetError(f"expansion exceeds {budget} monomials")
    return poly


def partition_symbolic(L: int, M: int, budget: int = MAX_MONOMIALS) -> dict[tuple[int, ...], Fraction]:
    """``Z`` as a polynomial in ABSOLUTE moments: sorted power multiset -> coefficient.

    Integrating ``x_1^{a_1} ... x_M^{a_M}`` against ``mu^M`` gives
    ``prod m<a_i>``, so monomials collapse onto sorted exponent multisets.
    """
    out: dict[tuple[int, ...], Fraction] = {}
    for exps, c in expand_vandermonde_power(M, L * L, budget).items():
        key = tuple(sorted(exps))
        out[key] = out.get(key, 0) + Fraction(c, math.factorial(M))
    return {k: v for k, v in out.items() if v}


def recenter(poly: dict[tuple[int, ...], Fraction], P: int) -> dict[tuple[int, ...], Fraction]:
    """Relabel absolute powers ``n`` as momenta ``n - P``."""
    return {tuple(n - P for n in k): v for k, v in poly.items()}


def circle_average(L: int, n_free: int, fixed=(), grid: int | None = None, budget: int = 50_000_000) -> float:
    """``E[prod_{a<b} |x_a - x_b|^{L^2}]`` with ``n_free`` Haar points and fixed unit-circle points.

    The mean over a uniform grid is exact for grid > L^2 (n_free + len(fixed) - 1) / 2.
    """
    beta = L * L
    total = n_free + len(fixed)
    need = beta * (total - 1) // 2 + 1
    grid = grid or need + 1
    if grid <= beta * (total - 1) // 2:
        raise ValueError(f"grid {grid} too coarse for exact integration (need > {need - 1})")
    if grid**n_free > budget:
        raise BudgetError(f"quadrature grid {grid}^{n_free} exceeds budget {budget}")
    fixed = [complex(y) for y in fixed]
    base = 1.0
    for a, b in itertools.combinations(fixed, 2):
        base *= abs(a - b) ** beta
    if n_free == 0:
        return base
    phi = 2 * np.pi * np.arange(grid) / grid
    z = np.exp(1j * phi)
    # one-particle weight against the fixed points
    w1 = np.ones(grid)
    for y in fixed:
        w1 = w1 * np.abs(z - y) ** beta
    pair = np.abs(z[:, None] - z[None, :]) ** beta
    val = np.ones((grid,) * n_free)
    for a in range(n_free):
        shape = [1] * n_free
        shape[a] = grid
        val = val * w1.reshape(shape)
    for a, b in itertools.combinations(range(n_free), 2):
        shape = [1] * n_free
        shape[a] = grid
        shape[b] = grid
        val = val * pair.reshape(shape)
    return base * float(val.mean())


def quadrature_circle(L: int, M: int, observable: str = "Z", points=(), grid: int | None = None, max_M: int = 3) -> float:
    """Circular-ensemble observables by direct quadrature.

    ``Z`` uses Haar probability measure: ``Z = E[prod |x_i - x_j|^beta] / M!``.
    ``R1`` and ``R2`` are densities w.r.t. Lebesgue ``dtheta`` (so ``int R1 = M``);
    ``points`` are angles.
    """
    if M > max_M:
        raise BudgetError(f"quadrature oracle limited to M <= {max_M}")
    if observable == "Z":
        return circle_average(L, M, (), grid) / math.factorial(M)
    m = {"R1": 1, "R2": 2}.get(observable)
    if m is None:
        raise ValueError(f"unknown observable {observable!r}")
    if len(points) != m:
        raise ValueError(f"{observable} needs {m} angles")
    fixed = [np.exp(1j * t) for t in points]
    # R_m = M!/(M-m)! * density marginal; density = prod|.|^beta / (M! Z (2 pi)^M)
    Z = circle_average(L, M, (), grid)
    avg = circle_average(L, M - m, fixed, grid)
    return math.factorial(M) / math.factorial(M - m) * avg / Z / (2 * np.pi) ** m


def pair_fourier_float(L: int, M: int, grid: int | None = None, n_theta: int | None = None) -> dict[int, float]:
    """Float Fourier coefficients of ``theta -> E[prod |.|^beta]`` with two points at ``e^{+-i theta/2}``.

    Sampling ``n_theta > 2P`` separations and taking a DFT is exact for this
    trig polynomial; the integral over the other ``M - 2`` points is a tensor
    contraction of a precomputed pair kernel.
    """
    beta = L * L
    P = beta * (M - 1) // 2
    grid = grid or beta * (M - 1) // 2 + 2
    n_theta = n_theta or 2 * P + 2
    n_free = M - 2
    phi = 2 * np.pi * np.arange(grid) / grid
    z = np.exp(1j * phi)
    pair = np.abs(z[:, None] - z[None, :]) ** beta
    kernel = np.ones((grid,) * n_free)
    for a, b in itertools.combinations(range(n_free), 2):
        shape = [1] * n_free
        shape[a] = grid
        shape[b] = grid
        kernel = kernel * pair.reshape(shape)
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    samples = np.empty(n_theta)
    for i, th in enumerate(thetas):
        y1, y2 = np.exp(0.5j * th), np.exp(-0.5j * th)
        f = np.abs(z - y1) ** beta * np.abs(z - y2) ** beta
        acc = kernel
        for _ in range(n_free):
            acc = acc @ f
        samples[i] = abs(y1 - y2) ** beta * float(acc) / grid**n_free
    coef = np.fft.rfft(samples) / n_theta
    return {p: float(coef[p].real) for p in range(P + 1)}


def mc_sample(
    L: int,
    M: int,
    steps: int,
    seed: int = 0,
    bins: int = 36,
    step_size: float = 0.8,
    thin: int = 10,
    beta: float | None = None,
) -> dict:
    """Metropolis chain on ``M`` angles; histogram of pair separations folded to ``[0, pi]``.

    ``beta`` overrides ``L^2`` (``beta=0`` gives the uniform limit).
    """
    rng = np.random.default_rng(seed)
    b = L * L if beta is None else beta
    theta = [float(t) for t in rng.uniform(0, 2 * math.pi, M)]

    def logw(i, t):
        # |e^{it} - e^{is}| = 2 |sin((t - s)/2)|
        acc = 0.0
        for k, s in enumerate(theta):
            if k != i:
                acc += math.log(max(2 * abs(math.sin(0.5 * (t - s))), 1e-300))
        return b * acc

    counts = np.zeros(bins, dtype=np.int64)
    accepted = 0
    moves = rng.integers(0, M, steps).tolist()
    jumps = rng.normal(0, step_size, steps).tolist()
    logu = np.log(rng.random(steps) + 1e-300).tolist()
    two_pi = 2 * math.pi
    pairs = list(itertools.combinations(range(M), 2))
    for s in range(steps):
        i = moves[s]
        new = (theta[i] + jumps[s]) % two_pi
        if logu[s] < logw(i, new) - logw(i, theta[i]):
            theta[i] = new
            accepted += 1
        if s % thin == 0:
            for a, c in pairs:
                d = abs(theta[a] - theta[c]) % two_pi
                d = min(d, two_pi - d)
                counts[min(int(d / math.pi * bins), bins - 1)] += 1
    edges = np.linspace(0, np.pi, bins + 1)
    return {"edges": edges, "counts": counts, "acceptance": accepted / steps, "samples": int(counts.sum())}
