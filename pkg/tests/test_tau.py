import json
from fractions import Fraction

import numpy as np
import pytest

from spinekit.exact_core import BudgetError, SparseForm
from spinekit.moments import MomentPoly, provider_circular, provider_formal, random_rational_table
from spinekit.spine import SpineContext, build_spine, wronskian_blade
from spinekit.tau import (
    CacheError,
    GramForm,
    PairConstantTable,
    TauPolynomial,
    hyperpfaffian,
    lifted_apply,
    load_table,
    pair_constants_circular,
    save_table,
    structure_constant,
    tau_derivative,
    tau_polynomial,
    wedge_power,
)

m = MomentPoly.symbol
CONFIGS = [(2, 2), (2, 3), (4, 2)]


def test_wedge_power_examples():
    b = build_spine(SpineContext(2, 2))
    assert wedge_power(b[0], 2) == SparseForm.blade((0, 1, 2, 3), 4, 6)
    assert wedge_power(b[1], 1) == b[1]
    w = wronskian_blade(Fraction(5, 2), SpineContext(2, 2))
    assert not wedge_power(w, 2)


def test_hyperpfaffian_examples():
    ctx = SpineContext(2, 1)
    t = random_rational_table(0, 5, 1)
    assert hyperpfaffian(GramForm.from_moments(ctx, t)) == t(0)
    ctx = SpineContext(2, 2)
    assert hyperpfaffian(GramForm.from_moments(ctx, provider_formal())) == m(0) * m(4) - 4 * m(1) * m(3) + 3 * m(2) * m(2)
    assert hyperpfaffian(GramForm.from_moments(ctx, provider_circular(ctx))) == 3


@pytest.mark.parametrize("L,M", CONFIGS)
def test_strategies_agree(L, M):
    ctx = SpineContext(L, M)
    gram = GramForm.from_moments(ctx, random_rational_table(0, 2 * ctx.P, L * 10 + M))
    values = {s: hyperpfaffian(gram, s) for s in ("iterated", "squaring", "filtered", "spine", "pruned")}
    assert len(set(values.values())) == 1, values


def test_tau_polynomial_l2_m2():
    tp = tau_polynomial(SpineContext(2, 2))
    assert tp.terms == {(-2, 2): 1, (-1, 1): -4, (0, 0): 3}


@pytest.mark.parametrize("L,M", CONFIGS)
def test_selection_rule_and_circular_evaluation(L, M):
    ctx = SpineContext(L, M)
    tp = tau_polynomial(ctx)
    assert all(sum(js) == 0 for js in tp.terms)
    circ = provider_circular(ctx)
    assert tp.evaluate(circ) == tp.terms.get((0,) * M, 0)
    assert tp.evaluate(circ) == hyperpfaffian(GramForm.from_moments(ctx, circ))


def test_structure_constants_by_hand():
    ctx = SpineContext(2, 2)
    assert structure_constant((-2, 2), ctx) == 1
    assert structure_constant((0, 0), ctx) == 6
    assert structure_constant((1, 2), ctx) == 0
    assert structure_constant((1, 2), ctx, shortcut=False) == 0


@pytest.mark.parametrize("L,M", CONFIGS)
def test_homogeneity(L, M):
    ctx = SpineContext(L, M)
    t = random_rational_table(0, 2 * ctx.P, 5)
    lam = Fraction(-7, 3)
    scaled = type(t)(t.kind, lambda n: lam * t(n), t.valid_range, True)
    tp = tau_polynomial(ctx)
    assert tp.evaluate(scaled) == lam**M * tp.evaluate(t)


def test_pair_constants_l2_m2():
    table = pair_constants_circular(SpineContext(2, 2))
    assert table.values == {0: 6, 1: -4, 2: 1}
    assert table[-1] == table[1] and table[3] == 0


@pytest.mark.parametrize("L,M", [(2, 2), (2, 3), (2, 4), (4, 2), (4, 3)])
def test_fourier_positivity(L, M):
    table = pair_constants_circular(SpineContext(L, M))
    th = np.linspace(0, np.pi, 10_000)
    vals = sum((1 if p == 0 else 2) * float(d) * np.cos(p * th) for p, d in table.values.items())
    assert vals.min() >= -1e-9 * abs(vals).max()


def test_pair_constants_threads_do_not_change_result():
    ctx = SpineContext(2, 4)
    assert pair_constants_circular(ctx, threads=2).values == pair_constants_circular(ctx, threads=1).values


@pytest.mark.parametrize("L,M", [(2, 2), (2, 3)])
@pytest.mark.parametrize("k", range(-3, 4))
def test_derivative_routes(L, M, k):
    ctx = SpineContext(L, M)
    t = random_rational_table(-3, 2 * ctx.P + 3, 11)
    assert tau_derivative(ctx, t, k) == tau_polynomial(ctx).derivative(t, k)


def test_derivative_formal_l2_m2():
    ctx = SpineContext(2, 2)
    f = provider_formal()
    z = hyperpfaffian(GramForm.from_moments(ctx, f))
    assert tau_derivative(ctx, f, 1) == z.shift(1)
    assert tau_derivative(ctx, f, 0) == 2 * z


def test_lifted_apply_examples():
    ctx = SpineContext(2, 3)
    t = random_rational_table(0, 2 * ctx.P + 4, 2)
    assert lifted_apply({0: 1}, ctx, t) == hyperpfaffian(GramForm.from_moments(ctx, t))
    ctx1 = SpineContext(2, 1)
    assert lifted_apply({3: 1}, ctx1, t) == t(3)


def test_budget_is_enforced():
    ctx = SpineContext(2, 4)
    gamma = GramForm.from_moments(ctx, random_rational_table(0, 12, 0)).realize()
    with pytest.raises(BudgetError):
        wedge_power(gamma, 3, "iterated", max_terms=5)


def test_cache_roundtrip_and_corruption(tmp_path):
    tp = tau_polynomial(SpineContext(2, 3))
    path = save_table(tp, tmp_path)
    data = json.loads(path.read_text())
    assert data["schema"] == 1 and data["kind"] == "tau" and data["L"] == 2 and data["M"] == 3
    assert load_table(2, 3, "tau", tmp_path).terms == tp.terms
    data["values"][next(iter(data["values"]))] = "999"
    path.write_text(json.dumps(data))
    with pytest.raises(CacheError):
        load_table(2, 3, "tau", tmp_path)
    path.write_text("{not json")
    with pytest.raises(CacheError):
        load_table(2, 3, "tau", tmp_path)
    assert load_table(2, 4, "tau", tmp_path) is None


def test_pair_table_json_schema(tmp_path):
    table = pair_constants_circular(SpineContext(2, 3))
    data = table.to_json()
    assert data["kind"] == "pair_constants" and all(isinstance(v, str) for v in data["values"].values())
    assert PairConstantTable.from_json(data).values == table.values
    assert TauPolynomial.from_json(tau_polynomial(SpineContext(2, 2)).to_json()).terms[(0, 0)] == 3


def test_cache_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINEKIT_CACHE_DIR", str(tmp_path / "c"))
    path = save_table(tau_polynomial(SpineContext(2, 2)))
    assert path.parent == tmp_path / "c"
