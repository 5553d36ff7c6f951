import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coklab.errors import DomainError, NonUnit
from coklab.ring import (
    crt_combine,
    crt_split,
    factorize,
    inverse_unit,
    is_prime,
    primes_up_to,
    smallest_nonsquare,
    square_class,
    val_p,
)


def test_factorize_examples():
    m = factorize(12)
    assert [(f.p, f.e) for f in m.factors] == [(2, 2), (3, 1)]
    assert [(f.p, f.e) for f in factorize(32).factors] == [(2, 5)]
    with pytest.raises(DomainError):
        factorize(1)


def test_primes():
    assert primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert not is_prime(1) and is_prime(2) and not is_prime(91)


def test_val_p_examples():
    assert val_p(6, 3, 3) == 1
    assert val_p(0, 3, 3) == 3
    assert val_p(8, 3, 3) == 0


def test_inverse_unit_examples():
    assert inverse_unit(3, 5) == 2
    assert inverse_unit(7, 16) == 7
    with pytest.raises(NonUnit):
        inverse_unit(5, 25)


def test_square_class_examples():
    assert square_class(4, 3, 2) == "square"
    assert square_class(2, 3, 2) == "nonsquare"
    assert square_class(17, 2, 5) == 1


def test_smallest_nonsquare():
    assert smallest_nonsquare(3) == 2
    assert smallest_nonsquare(7) == 3


def test_crt_examples():
    m12 = factorize(12)
    assert crt_split(7, m12) == [3, 1]
    assert crt_split(0, m12) == [0, 0]
    assert crt_combine([1, 2], m12) == 5


@given(st.sampled_from([(3, 2), (5, 2), (7, 1), (2, 4)]), st.integers(0, 10**6), st.integers(0, 10**6))
def test_square_class_stable_under_squares(pe, u, v):
    p, e = pe
    q = p**e
    u, v = u % q, v % q
    if u % p == 0 or v % p == 0:
        return
    assert square_class(u * v * v % q, p, e) == square_class(u, p, e)


@given(st.sampled_from([9, 16, 25, 27]), st.integers(0, 10**6))
def test_inverse_is_involution(q, x):
    x %= q
    p = factorize(q).factors[0].p
    if x % p == 0:
        return
    assert inverse_unit(inverse_unit(x, q), q) == x


def test_crt_is_ring_isomorphism():
    r = random.Random(7)
    for a in (12, 360, 2 * 9 * 25 * 7):
        m = factorize(a)
        for _ in range(1000 // 3):
            x, y = r.randrange(a), r.randrange(a)
            sx, sy = crt_split(x, m), crt_split(y, m)
            qs = [f.q for f in m.factors]
            assert crt_split((x + y) % a, m) == [(s + t) % q for s, t, q in zip(sx, sy, qs)]
            assert crt_split(x * y % a, m) == [s * t % q for s, t, q in zip(sx, sy, qs)]
            assert crt_combine(sx, m) == x
