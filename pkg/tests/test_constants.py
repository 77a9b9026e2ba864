import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import poonen_rains_direct, zeta
from ranklab.constants import (
    KAPPA,
    brumer_kappa,
    poonen_rains_s,
    s_weighted_sum,
    selmer_density_table,
    tail_bound,
)


@pytest.mark.parametrize("n,want", [(0, 0.20971122), (1, 0.41942244), (5, 0.00068722)])
def test_density_reference_values(n, want):
    assert poonen_rains_s(n) == pytest.approx(want, abs=1e-8)


def test_densities_match_direct_product():
    for n in range(31):
        assert poonen_rains_s(n) == pytest.approx(poonen_rains_direct(n), rel=1e-13)


@given(st.integers(min_value=0, max_value=10))
def test_consecutive_ratio(n):
    assert poonen_rains_s(n + 1) / poonen_rains_s(n) == pytest.approx(2 / (2 ** (n + 1) - 1), abs=1e-12)


def test_decreasing_from_one():
    vals = selmer_density_table(30)
    assert all(a > b for a, b in zip(vals[1:], vals[2:]))


def test_negative_rank_rejected():
    with pytest.raises(ValueError):
        poonen_rains_s(-1)


def test_kappa_against_zeta():
    want = 2 ** (4 / 3) / (zeta(10) * 3**1.5)
    assert brumer_kappa() == pytest.approx(want, rel=1e-14)
    assert KAPPA == pytest.approx(0.484462004349, abs=1e-12)
    assert 5 * KAPPA / 6 == pytest.approx(0.403718336957, abs=1e-11)
    assert 6 / (5 * KAPPA) == pytest.approx(2.476974436029, abs=1e-11)


def test_weighted_sums():
    assert abs(s_weighted_sum("total", 30) - 1) <= 1e-8
    assert abs(s_weighted_sum("alternating", 30)) <= 1e-8
    assert abs(s_weighted_sum("odd", 30) - 0.5) <= 1e-8
    assert s_weighted_sum("first_moment", 30) == pytest.approx(1.26449978, abs=1e-7)
    assert s_weighted_sum("odd", 5) == pytest.approx(0.49999965, abs=1e-7)
    with pytest.raises(ValueError):
        s_weighted_sum("median", 5)


@pytest.mark.parametrize("nmax", [3, 5, 8, 12])
def test_tail_bound_covers_truncation(nmax):
    exact = math.fsum(n * poonen_rains_s(n) for n in range(nmax + 1, 60))
    assert exact <= tail_bound(nmax)
