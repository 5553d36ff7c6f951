import math
from fractions import Fraction

import numpy as np
import pytest

from coklab.cokernel import GroupType, parse_key, quasi_class
from coklab.errors import DomainError
from coklab.limits import (
    OTHER,
    DistributionTable,
    conditional_nil_law,
    l_distance,
    modulus_for,
    mu_inf_alt_even,
    mu_inf_alt_odd,
    mu_inf_sym,
    nil_space,
    nu_inf_alt_even,
    nu_inf_alt_odd,
    nu_inf_sym,
    product_alt_odd,
    product_sym,
    reference_table,
)
from coklab.matrices import ModMatrix


def test_product_examples():
    assert product_sym(3)[0] == pytest.approx(0.63900, abs=5e-6)
    assert product_sym(2)[0] == pytest.approx(0.41942, abs=5e-6)
    assert product_sym(3, 40)[0] == pytest.approx(product_sym(3, 80)[0], abs=1e-15)
    for p in (2, 3, 7):
        assert product_sym(p, 1)[0] == pytest.approx(1 - 1 / p)


def test_product_monotone_with_tail_bound():
    for p in (2, 3, 5):
        vals = [product_sym(p, k) for k in range(1, 30)]
        for (a, tail), (b, _) in zip(vals, vals[1:]):
            assert b <= a
        for k, (v, tail) in enumerate(vals, start=1):
            assert tail <= sum(p ** (1 - 2 * j) for j in range(k + 1, k + 60)) * (1 + 1e-9)
            assert v - product_sym(p, 80)[0] <= tail + 1e-15


def test_mu_sym_examples():
    assert mu_inf_sym(parse_key("3:():S")) == pytest.approx(0.63900, abs=5e-6)
    for key in ("3:(1):S00", "3:(1):S01"):
        assert mu_inf_sym(parse_key(key)) == pytest.approx(0.10650, abs=5e-6)
    both = mu_inf_sym(primes=[2, 3], aut_order=1, group_order=1)
    assert both == pytest.approx(0.268, abs=5e-5)
    assert both == pytest.approx(product_sym(2)[0] * product_sym(3)[0], rel=1e-12)


def test_mu_sym_factorizes():
    m = ModMatrix(np.diag([3, 2, 5]), 2**5 * 27)
    key = quasi_class(m)
    singles = [mu_inf_sym(part) for part in key.parts]
    assert mu_inf_sym(key) == pytest.approx(math.prod(singles), rel=1e-12)


def test_mu_alt_examples():
    assert mu_inf_alt_even((), [2]) == pytest.approx(0.41942, abs=5e-6)
    assert mu_inf_alt_even((1,), [2]) == pytest.approx(0.27961, abs=5e-6)
    # the truncated product is 0.838845; the rounded figure 0.839 is quoted to three places
    assert mu_inf_alt_odd((), [2]) == pytest.approx(0.839, abs=5e-4)
    assert mu_inf_alt_odd((), [2]) == pytest.approx(product_alt_odd(2)[0])


def test_nu_examples():
    assert nu_inf_sym(3, 0) == pytest.approx(0.63900, abs=5e-6)
    assert nu_inf_sym(3, 1) == pytest.approx(0.31950, abs=5e-6)
    assert nu_inf_alt_even(2, 1) == pytest.approx(0.55923, abs=5e-6)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("law", [nu_inf_sym, nu_inf_alt_even, nu_inf_alt_odd])
def test_corank_laws_sum_to_one(p, law):
    assert sum(law(p, k) for k in range(31)) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_trivial_class_is_corank_zero(p):
    assert mu_inf_sym(primes=[p], aut_order=1, group_order=1) == pytest.approx(nu_inf_sym(p, 0), abs=1e-9)
    assert mu_inf_alt_even((), [p]) == pytest.approx(nu_inf_alt_even(p, 0), abs=1e-9)
    assert mu_inf_alt_odd((), [p]) == pytest.approx(nu_inf_alt_odd(p, 0), abs=1e-9)


def test_l_distance_examples():
    t = {"A": 0.3, "B": 0.7}
    assert l_distance(t, dict(t)) == 0
    assert l_distance({"A": 1}, {"B": 1}) == 2
    assert l_distance({"A": 0.5, "B": 0.5}, {"A": 1}, q=2) == pytest.approx(0.70711, abs=5e-6)
    with pytest.raises(DomainError):
        l_distance(t, t, q=0.5)


def test_l_distance_triangle(rng):
    keys = list("ABCDEF")
    for _ in range(200):
        tabs = []
        for _ in range(3):
            w = rng.random(len(keys)) * (rng.random(len(keys)) < 0.7)
            tabs.append({k: float(v) for k, v in zip(keys, w / max(w.sum(), 1e-12))})
        q = float(rng.choice([1, 2, 3.5]))
        a, b, c = tabs
        assert l_distance(a, c, q) <= l_distance(a, b, q) + l_distance(b, c, q) + 1e-12
        assert l_distance(a, b, q) == pytest.approx(l_distance(b, a, q))


def test_modulus_for_examples():
    assert modulus_for(GroupType((2,)), [2], "symmetric").a == 32
    assert modulus_for(GroupType((2,)), [3], "symmetric").a == 27
    assert modulus_for(GroupType((1,)), [2], "alternating").a == 4
    assert modulus_for({2: GroupType((1,))}, [2, 3], "symmetric").a == 16 * 3


def test_nil_space_and_conditional_law():
    assert nil_space(2, 3, 2).shape == (27, 2, 2)
    assert nil_space(3, 2, 2, "alternating").shape == (8, 3, 3)
    law = conditional_nil_law(1, 3, 2)
    assert sum(law.values()) == 1 and all(isinstance(v, Fraction) for v in law.values())
    # a 1x1 nil matrix mod 9: three values, 0 is undetermined
    assert law == {"3:(1):S00": Fraction(1, 3), "3:(1):S01": Fraction(1, 3), "3:(2):U": Fraction(1, 3)}


def test_reference_table_matches_limits():
    t = reference_table("symmetric", 3, 2, 3)
    assert t.total_mass == pytest.approx(1, abs=1e-12)
    assert t.get("3:():S") == pytest.approx(nu_inf_sym(3, 0))
    assert t.get("3:(1):S00") == pytest.approx(mu_inf_sym(parse_key("3:(1):S00")))
    alt = reference_table("alternating", 2, 2, 2, parity=0)
    assert alt.get("2:(1):A00") == pytest.approx(mu_inf_alt_even((1,), [2]))
    odd = reference_table("alternating", 2, 2, 2, parity=1)
    assert odd.get("2:():A01") == pytest.approx(mu_inf_alt_odd((), [2]))
    assert 0 <= odd.get(OTHER) < 1e-3


def test_distribution_table_counts_and_merge():
    a = DistributionTable.from_counts(["x", "x", "y"])
    b = DistributionTable.from_counts({"y": 2, "z": 1})
    both = a.merge(b)
    assert both.samples == 6 and both.counts == {"x": 2, "y": 3, "z": 1}
    assert both.get("y") == pytest.approx(0.5)
    assert b.merge(a).probs == both.probs
    assert both.to_csv().splitlines()[0] == "key,probability,count"
    assert both.stderr("y") == pytest.approx(math.sqrt(0.25 / 6))
