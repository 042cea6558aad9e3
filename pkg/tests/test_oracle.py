import math
from fractions import Fraction

import numpy as np
import pytest

from spinekit.correlation import circular_pair_curve
from spinekit.exact_core import BudgetError
from spinekit.oracle import (
    circle_average,
    expand_vandermonde_power,
    mc_sample,
    pair_fourier_float,
    partition_symbolic,
    quadrature_circle,
    recenter,
)
from spinekit.spine import SpineContext
from spinekit.tau import pair_constants_circular, tau_polynomial


def test_partition_symbolic_examples():
    assert partition_symbolic(2, 2) == {(0, 4): 1, (1, 3): -4, (2, 2): 3}
    assert partition_symbolic(2, 1) == {(0,): 1}


@pytest.mark.parametrize("L,M", [(2, 2), (2, 3), (4, 2)])
def test_symbolic_matches_tau_polynomial(L, M):
    ctx = SpineContext(L, M)
    assert recenter(partition_symbolic(L, M), ctx.P) == tau_polynomial(ctx).terms


@pytest.mark.parametrize("L,M", [(2, 2), (2, 3), (4, 2)])
def test_point_mass_at_zero(L, M):
    # m<n> = [n == 0]: only the all-zero exponent multiset survives
    assert partition_symbolic(L, M).get((0,) * M, 0) == 0


def test_expansion_budget():
    with pytest.raises(BudgetError):
        expand_vandermonde_power(3, 4, budget=10)


def test_quadrature_values():
    assert quadrature_circle(2, 2, "Z") == pytest.approx(3, rel=1e-12)
    assert quadrature_circle(4, 2, "Z") == pytest.approx(6435, rel=1e-12)
    assert quadrature_circle(2, 3, "Z") == pytest.approx(15, rel=1e-12)


def test_quadrature_grid_must_resolve_degree():
    with pytest.raises(ValueError):
        circle_average(2, 2, grid=2)
    with pytest.raises(BudgetError):
        quadrature_circle(2, 4, "Z")


@pytest.mark.parametrize("M", [2, 3])
def test_r1_is_uniform(M):
    vals = [quadrature_circle(2, M, "R1", (t,)) for t in (0.0, 0.7, 2.9)]
    assert vals == pytest.approx([M / (2 * math.pi)] * 3, rel=1e-12)


@pytest.mark.parametrize("L,M", [(2, 2), (2, 3), (4, 2), (4, 3)])
def test_r2_quadrature_matches_exact_curve(L, M):
    # the curve is scaled so that its [0, pi] integral is C(M, 2), i.e. 2 pi R2
    curve = circular_pair_curve(L, M)
    for th in (0.4, 1.3, 2.2, 3.0):
        q = quadrature_circle(L, M, "R2", (th / 2, -th / 2))
        assert curve.evaluate([th])[0] == pytest.approx(2 * math.pi * q, rel=1e-9)


@pytest.mark.parametrize("L,M", [(2, 3), (4, 3), (4, 4)])
def test_float_fourier_matches_exact_table(L, M):
    table = pair_constants_circular(SpineContext(L, M))
    approx = pair_fourier_float(L, M)
    d0 = table.values[0]
    for p, d in table.values.items():
        assert approx[p] / approx[0] == pytest.approx(float(Fraction(d, d0)), abs=1e-9)


def _binned(curve, edges):
    g = np.linspace(0, np.pi, 24001)
    v = curve.evaluate(g)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (g >= a) & (g <= b)
        out.append(np.trapezoid(v[sel], g[sel]))
    out = np.array(out)
    return out / out.sum()


def test_mc_deterministic():
    a = mc_sample(2, 3, 5000, seed=4)
    b = mc_sample(2, 3, 5000, seed=4)
    assert np.array_equal(a["counts"], b["counts"])


def test_mc_uniform_limit():
    res = mc_sample(2, 2, 200_000, seed=2, bins=12, beta=0)
    n = res["counts"].sum()
    expected = n / 12
    assert np.all(np.abs(res["counts"] - expected) < 3 * np.sqrt(expected))


def test_mc_matches_exact_curve():
    res = mc_sample(2, 2, 1_000_000, seed=0, bins=12)
    n = res["counts"].sum()
    expected = _binned(circular_pair_curve(2, 2), res["edges"]) * n
    sigma = np.sqrt(np.maximum(expected, 1))
    assert np.all(np.abs(res["counts"] - expected) < 3 * sigma)


def test_beta16_peak_position_by_quadrature():
    # brute-force R2 for M=5 agrees with the exact curve and puts the first peak below 2 pi / 5
    curve = circular_pair_curve(4, 5)
    vals = {}
    for f in (0.39494, 0.4):
        th = f * math.pi
        vals[f] = 2 * math.pi * quadrature_circle(4, 5, "R2", (th / 2, -th / 2), max_M=5)
        assert curve.evaluate([th])[0] == pytest.approx(vals[f], rel=1e-9)
    assert vals[0.39494] > vals[0.4]
