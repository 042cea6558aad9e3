import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinekit.exact_core import ContractError, LaurentPoly
from spinekit.moments import (
    MiwaShift,
    MomentPoly,
    RangeError,
    derivative_shift,
    dump_moment_table,
    load_moment_table,
    miwa_insert,
    miwa_remove,
    poly_from_roots,
    provider_circular,
    provider_formal,
    provider_gaussian,
    provider_table,
    random_rational_table,
    shift_by_polynomial,
)
from spinekit.spine import SpineContext

m = MomentPoly.symbol


def test_circular_is_delta_at_center():
    ctx = SpineContext(2, 2)
    c = provider_circular(ctx)
    assert c.at(ctx, 0) == 1
    assert c.at(ctx, 1) == 0 and c.at(ctx, -1) == 0
    assert derivative_shift(c, 1).at(ctx, -1) == 1
    assert derivative_shift(c, 1).at(ctx, 0) == 0


def test_formal_shift_composition():
    f = provider_formal()
    assert f(5) == m(5)
    assert derivative_shift(derivative_shift(f, 2), 3)(0) == derivative_shift(f, 5)(0)


def test_table_shift_pointwise():
    t = provider_table({j: j * j for j in range(-5, 6)})
    s = derivative_shift(t, 1)
    assert all(s(j) == (j + 1) ** 2 for j in range(-5, 5))
    with pytest.raises(RangeError):
        s(5)


def test_gaussian_parity_and_ratio():
    g = provider_gaussian()
    assert g(3) == 0
    assert g(2) / g(0) == pytest.approx(0.5)
    assert not g.exact


def test_insert_coefficients_l2():
    ctx = SpineContext(2, 2)
    series = miwa_insert(provider_formal(), ctx)
    n = ctx.P
    assert series[0] == LaurentPoly({0: m(n), -1: -4 * m(n + 1), -2: 6 * m(n + 2), -3: -4 * m(n + 3), -4: m(n + 4)})
    assert MiwaShift("insert", 4).coefficients() == [1, -4, 6, -4, 1]


def test_remove_coefficients_l2():
    assert MiwaShift("remove", 4, 4).coefficients() == [1, 4, 10, 20, 35]
    ctx = SpineContext(2, 2)
    assert miwa_remove(provider_formal(), ctx, 0)[1] == LaurentPoly.constant(m(ctx.P + 1))
    circ = miwa_remove(provider_circular(ctx), ctx, 2)
    assert circ[0] == LaurentPoly.constant(1)


def test_circular_insert_at_zero():
    ctx = SpineContext(2, 2)
    assert miwa_insert(provider_circular(ctx), ctx)[0] == LaurentPoly.constant(1)


def test_remove_needs_truncation():
    with pytest.raises(ContractError):
        MiwaShift("remove", 4)


def test_miwa_components_resum_to_weight():
    # exp(sum_k -w x^k/(k z^k)) = (1 - x/z)^w: check the k = 1, 2 components
    comp = MiwaShift("insert", 4).components(Fraction(3), 2)
    assert comp == {1: Fraction(-4, 3), 2: Fraction(-4, 2) / 9}


small_q = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 5))


@given(st.lists(small_q, min_size=1, max_size=3), st.integers(1, 4))
def test_poly_from_roots_vanishes_at_roots(roots, power):
    q = poly_from_roots(roots, power)
    assert max(q) == len(roots) * power
    for r in roots:
        assert sum(c * r**k for k, c in q.items()) == 0


def test_shift_by_polynomial_is_weighted_measure():
    t = random_rational_table(0, 20, seed=3)
    q = {0: -2, 1: 1}  # x - 2
    s = shift_by_polynomial(t, q)
    assert s(4) == t(5) - 2 * t(4)
    with pytest.raises(RangeError):
        s(20)


def test_moment_table_roundtrip(tmp_path):
    vals = {n: Fraction(n * n - 3, 7) for n in range(0, 9)}
    dump_moment_table(vals, tmp_path / "m.json")
    back = load_moment_table(tmp_path / "m.json")
    assert all(back(n) == v for n, v in vals.items())


def test_moment_poly_derivative_is_leibniz():
    p = m(1) * m(3) + 2 * m(2)
    assert p.shift(1) == m(2) * m(3) + m(1) * m(4) + 2 * m(3)
    assert p.evaluate(lambda n: n) == 3 + 4


def test_random_table_is_seeded():
    a, b = random_rational_table(0, 10, 9), random_rational_table(0, 10, 9)
    assert [a(n) for n in range(11)] == [b(n) for n in range(11)]
    assert math.isfinite(float(a(3)))
