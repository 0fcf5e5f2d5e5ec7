import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubeforms.bounds import (
    FiberedInvariants,
    ThurstonInput,
    bd_sandwich,
    covering_scaling,
    dehn_example_growth,
    domination_threshold,
    entropy_relations,
    exact_const,
    fiber_translation,
    linf_l2_constant,
    main_ratio_bound,
    product_volume,
    product_volume_comparison,
    thurston_lower_bound,
)
from tubeforms.errors import DomainError


def test_exact_constant():
    assert exact_const() == pytest.approx(2 * math.pi * 0.29 / math.sqrt(7.256), rel=1e-15)
    assert 0.676 < exact_const() < 0.677


def test_thurston_exact_beats_simplified_at_threshold():
    b = thurston_lower_bound(ThurstonInput(58e-6, 1))
    assert b.value == pytest.approx(82.5377, abs=1e-3)
    assert b.dominates_simplified and b.valid_regime and not b.vacuous


def test_thurston_rounded_constant_loses_domination():
    b = thurston_lower_bound(ThurstonInput(58e-6, 1), exact_constants=False)
    assert not b.dominates_simplified


def test_domination_threshold_is_sharp():
    lam = domination_threshold()
    assert thurston_lower_bound(ThurstonInput(lam * 0.999, 1)).dominates_simplified
    assert not thurston_lower_bound(ThurstonInput(lam * 1.001, 1)).dominates_simplified
    assert lam > 58e-6


def test_thurston_vacuous_and_kappa_scaling():
    assert thurston_lower_bound(ThurstonInput(0.1, 3)).vacuous
    a = thurston_lower_bound(ThurstonInput(1e-6, 1)).value
    assert thurston_lower_bound(ThurstonInput(1e-6, -4)).value == pytest.approx(4 * a)
    with pytest.raises(DomainError):
        ThurstonInput(0.0, 1)


def test_sandwich():
    lo, hi = bd_sandwich(4.0, 0.25, 2.0)
    assert (lo, hi) == pytest.approx((math.pi, 40 * math.pi))
    with pytest.raises(DomainError):
        bd_sandwich(0.0, 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 100.0), st.floats(0.0, 1.0), st.floats(0.0, 50.0))
def test_sandwich_ordered_when_inj_le_vol(vol, frac, th):
    inj = max(frac * vol, 1e-3)
    lo, hi = bd_sandwich(vol, inj, th)
    assert lo <= hi


def test_main_ratio_bound():
    assert main_ratio_bound(1.0, 0.0) == pytest.approx(3 * math.pi)
    # tends to 8 sqrt(log cosh R) only as c_eps π / sqrt(log cosh R) -> 0
    big = main_ratio_bound(1e-3, 1e6) / math.sqrt(1e6 - math.log(2))
    assert big == pytest.approx(8.0, rel=1e-3)
    with pytest.raises(DomainError):
        main_ratio_bound(0.0, 1.0)


def test_linf_constant_and_fiber_translation():
    assert linf_l2_constant(0.25) == 10.0
    assert fiber_translation(4.0) == 0.25
    with pytest.raises(DomainError):
        fiber_translation(0.0)


def test_entropy_relations_consistent():
    rep = entropy_relations(FiberedInvariants(K=1.0, ent=0.5, vol=2.0, thurston=0.5, genus=2))
    assert rep.consistent and not rep.notes
    assert rep.row("volume_entropy").rhs == pytest.approx(3 * math.pi * 2 * 0.5)


def test_entropy_relations_flag_inconsistency():
    rep = entropy_relations(FiberedInvariants(K=1.0, ent=0.25, vol=2.0, thurston=0.5, genus=2))
    assert not rep.consistent
    assert not rep.row("lipschitz_entropy").satisfied
    assert rep.notes and "lipschitz_entropy" in rep.notes[0]
    d = rep.rows[0].as_dict()
    assert set(d) == {"name", "lhs", "rhs", "satisfied", "slack", "anchor"}


def test_fibered_invariants_validation():
    with pytest.raises(DomainError):
        FiberedInvariants(1.0, 1.0, 1.0, 1.0, genus=1)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 10.0))
def test_covering_product_invariant(lip, ent):
    prods = [covering_scaling(lip * n, n, ent / n).product for n in range(1, 21)]
    assert max(prods) - min(prods) <= 4 * math.ulp(lip * ent)


def test_covering_validation():
    with pytest.raises(DomainError):
        covering_scaling(1.0, 0)


def test_product_volume():
    assert product_volume(2, 1.0) == pytest.approx(4 * math.pi)
    rep = product_volume_comparison(2, 1.0, 7.0)
    assert rep.consistent
    assert not product_volume_comparison(2, 1.0, 6.0).consistent


def test_dehn_growth():
    g = dehn_example_growth(1000, 1.0)
    assert g.lower_bound == pytest.approx(200 * math.pi)
    assert g.lambda_n == pytest.approx(1e-6) and g.valid_regime
    for n in (1, 7, 500):
        assert dehn_example_growth(2 * n, 3.0).lower_bound == 2 * dehn_example_growth(n, 3.0).lower_bound
    with pytest.raises(DomainError):
        dehn_example_growth(0, 1.0)
