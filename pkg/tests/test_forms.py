import numpy as np
import pytest

from coklab.cokernel import group_type, quasi_class
from coklab.errors import DomainError, InsufficientPrecision
from coklab.forms import (
    HYPERBOLIC,
    UNIT,
    V_BLOCK,
    TwoAdicBlock,
    assemble_blocks,
    canonical_alt,
    canonical_sym_odd,
    decompose_sym_2,
    pad_invertible,
    same_pairing_scalar,
    ti_class,
)
from coklab.matrices import ALTERNATING, ModMatrix, block_diag, congruence_apply, random_invertible

from conftest import random_sym


def test_canonical_sym_odd_examples():
    c = canonical_sym_odd(ModMatrix(np.eye(3, dtype=int), 9))
    assert c.lam == (0, 0, 0) and c.eps == (1, 1, 1)
    c = canonical_sym_odd(ModMatrix(np.diag([2, 1]), 9))
    assert c.lam == (0, 0) and c.eps == (1, 2)
    c = canonical_sym_odd(ModMatrix([[0, 1], [1, 0]], 9))
    assert c.lam == (0, 0) and c.eps == (1, 2)


def test_canonical_matrix_is_congruent_label():
    c = canonical_sym_odd(ModMatrix(np.diag([3, 6, 1]), 27))
    assert canonical_sym_odd(c.matrix()) == c


def test_decompose_sym_2_examples():
    assert decompose_sym_2(ModMatrix(np.diag([1, 2]), 32)) == [TwoAdicBlock(0, UNIT, 1), TwoAdicBlock(1, UNIT, 1)]
    assert decompose_sym_2(ModMatrix([[0, 2], [2, 0]], 32)) == [TwoAdicBlock(1, HYPERBOLIC)]
    assert decompose_sym_2(ModMatrix([[2, 1], [1, 2]], 32)) == [TwoAdicBlock(0, V_BLOCK)]


def test_decompose_needs_precision():
    with pytest.raises(InsufficientPrecision):
        decompose_sym_2(ModMatrix([[2]], 4))


def test_ti_class_examples():
    assert ti_class(TwoAdicBlock(1, UNIT, 3)) == ti_class(TwoAdicBlock(1, UNIT, 7))
    assert ti_class(TwoAdicBlock(2, UNIT, 1)) == ti_class(TwoAdicBlock(2, UNIT, 5))
    assert ti_class(TwoAdicBlock(2, UNIT, 3)) != ti_class(TwoAdicBlock(2, UNIT, 1))
    assert ti_class(TwoAdicBlock(3, UNIT, 1)) != ti_class(TwoAdicBlock(3, UNIT, 5))


def test_canonical_alt_examples(rng):
    assert canonical_alt(ModMatrix([[0, 1], [-1, 0]], 27, ALTERNATING)).lam == (0,)
    assert canonical_alt(ModMatrix([[0, 3], [-3, 0]], 27, ALTERNATING)).lam == (1,)
    base = ModMatrix(block_diag(np.array([[0, 3], [-3, 0]]), np.array([[0, 1], [-1, 0]])), 27, ALTERNATING)
    for _ in range(100):
        u = random_invertible(4, 27, rng)
        assert canonical_alt(congruence_apply(u, base)).lam == (1, 0)


def test_same_pairing_scalar_examples():
    assert same_pairing_scalar(3, 12, 3, 3)
    assert not same_pairing_scalar(3, 6, 3, 3)
    assert same_pairing_scalar(10, 10, 5, 3)
    with pytest.raises(DomainError):
        same_pairing_scalar(1, 1, 2, 3)


def test_pad_invertible_examples():
    assert pad_invertible(ModMatrix([[2]], 32), ModMatrix([[1]], 32)).entries.tolist() == [[1, 0], [0, 2]]
    empty = ModMatrix(np.zeros((0, 0)), 5)
    assert pad_invertible(empty, ModMatrix(np.eye(2, dtype=int), 5)).entries.tolist() == [[1, 0], [0, 1]]
    m = pad_invertible(ModMatrix([[0, 3], [-3, 0]], 27, ALTERNATING), ModMatrix([[0, 1], [-1, 0]], 27, ALTERNATING))
    assert m.n == 4 and canonical_alt(m).lam == (1, 0)
    with pytest.raises(DomainError):
        pad_invertible(ModMatrix([[2]], 9), ModMatrix([[3]], 9))


def test_canonical_sym_odd_invariance(rng):
    for _ in range(1000):
        p = int(rng.choice([3, 5, 7]))
        e = int(rng.integers(1, 4))
        n = int(rng.integers(1, 7))
        q = p**e
        a = random_sym(rng, n, q)
        s = p ** rng.integers(0, e + 1, size=n)
        m = ModMatrix(a * s[:, None] * s[None, :] % q, q)
        u = random_invertible(n, q, rng)
        assert canonical_sym_odd(congruence_apply(u, m)) == canonical_sym_odd(m)


def test_decomposition_keeps_class(rng):
    q = 64
    for _ in range(500):
        n = int(rng.integers(1, 7))
        s = 2 ** rng.integers(0, 3, size=n)
        a = random_sym(rng, n, q) * s[:, None] * s[None, :] % q
        m = ModMatrix(a, q)
        if sum(group_type(m).lam) > 10:
            continue  # above the brute-force group cap
        try:
            blocks = decompose_sym_2(m)
        except InsufficientPrecision:
            continue
        assert quasi_class(assemble_blocks(blocks, 6)) == quasi_class(m)


def test_high_valuation_perturbation(rng):
    for p, e, shift in ((3, 4, 1), (5, 3, 1), (2, 6, 3)):
        q = p**e
        for _ in range(100):
            d = np.array([p ** int(v) * int(u) for v, u in zip(rng.integers(0, 2, 3), rng.choice([1, p + 2 if p > 2 else 3], 3))])
            depth = max(int(np.max([_v(x, p) for x in d])), 0)
            m = np.diag(d)
            delta = random_sym(rng, 3, q) * p ** (depth + shift)
            a, b = ModMatrix(m % q, q), ModMatrix((m + delta) % q, q)
            assert quasi_class(a) == quasi_class(b)


def _v(x, p):
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v
