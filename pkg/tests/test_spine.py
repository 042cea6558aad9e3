import math
from fractions import Fraction

import pytest

from spinekit.exact_core import ContractError, SparseForm, mask_of
from spinekit.spine import (
    SpineContext,
    build_spine,
    mask_momentum,
    momentum,
    superfactorial,
    vandermonde_check,
    vandermonde_weight,
    wronskian_blade,
    wronskian_blade_direct,
)


def blade(idx, dim=4, c=1):
    return SparseForm.blade(idx, dim, c)


@pytest.mark.parametrize("L,N", [(1, 2), (3, 2), (0, 1), (2, 0)])
def test_invalid_context(L, N):
    with pytest.raises(ContractError):
        SpineContext(L, N)


def test_momentum_examples():
    assert momentum((0, 1), SpineContext(2, 1)) == 0
    ctx = SpineContext(2, 2)
    assert momentum((0, 1), ctx) == -2
    assert momentum((2, 3), ctx) == 2
    assert momentum((0, 3), ctx) == 0 and momentum((1, 2), ctx) == 0


@pytest.mark.parametrize("u,w", [((0, 1), 1), ((0, 3), 3), ((1, 2), 1), ((0, 2), 2), ((0, 1, 2, 3), 12)])
def test_vandermonde_weight(u, w):
    assert vandermonde_weight(u) == w


def test_spine_l2_n2_by_hand():
    b = build_spine(SpineContext(2, 2))
    assert b[-2] == blade((0, 1))
    assert b[-1] == blade((0, 2), c=2)
    assert b[0] == blade((0, 3), c=3) + blade((1, 2))
    assert b[1] == blade((1, 3), c=2)
    assert b[2] == blade((2, 3))
    assert not b[3]


def test_spine_single_sector():
    b = build_spine(SpineContext(2, 1))
    assert b.momentum_range == (0, 0)
    assert b[0] == SparseForm.blade((0, 1), 2)


@pytest.mark.parametrize("L,N", [(2, 1), (2, 2), (2, 4), (4, 2), (4, 3)])
def test_sector_count_and_blade_partition(L, N):
    ctx = SpineContext(L, N)
    b = build_spine(ctx)
    assert len(b.eps) == ctx.n_sectors == 2 * ctx.P + 1
    assert sum(len(e) for e in b.eps.values()) == math.comb(ctx.dim, L)
    for j, e in b.eps.items():
        assert all(mask_momentum(m, ctx) == j for m in e.terms)


def test_weights_are_integer_minors():
    # coefficients Delta_u / sf(L-1) equal det[binom(u_b, a)], so they stay integral
    b = build_spine(SpineContext(4, 3))
    assert all(isinstance(v, int) for e in b.eps.values() for v in e.terms.values())
    assert superfactorial(3) == 12


def test_wronskian_examples():
    assert wronskian_blade(Fraction(7, 3), SpineContext(2, 1)) == SparseForm.blade((0, 1), 2)
    ctx = SpineContext(2, 2)
    b = build_spine(ctx)
    total = SparseForm.zero(2, 4)
    for e in b.eps.values():
        total = total + e
    assert wronskian_blade(1, ctx) == total
    w2 = wronskian_blade(2, ctx)
    assert w2.coeff((0, 1)) == 1 and w2.coeff((2, 3)) == 16
    for j, e in b.eps.items():
        for m, c in e.terms.items():
            assert w2.terms[m] == 2 ** (2 + j) * c


@pytest.mark.parametrize("L,N", [(2, 2), (2, 3), (4, 2)])
def test_spine_route_matches_taylor_wedge(L, N, rng):
    ctx = SpineContext(L, N)
    for _ in range(3):
        x = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
        assert wronskian_blade(x, ctx) == wronskian_blade_direct(x, ctx)


@pytest.mark.parametrize(
    "L,points,value",
    [(2, (0, 1), 1), (4, (0, 1), 1), (2, (0, 1, 3), 1296), (2, (5, 5), 0)],
)
def test_vandermonde_examples(L, points, value):
    rep = vandermonde_check(points, SpineContext(L, len(points)))
    assert rep.equal and rep.lhs == value


def test_vandermonde_needs_matching_count():
    with pytest.raises(ContractError):
        vandermonde_check((0, 1, 2), SpineContext(2, 2))


def test_mask_momentum_multi_degree():
    ctx = SpineContext(2, 2)
    assert mask_momentum(mask_of((0, 1, 2, 3)), ctx) == 0
