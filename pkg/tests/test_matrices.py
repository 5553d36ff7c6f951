import itertools

import numpy as np
import pytest

from coklab.errors import DomainError, StructureError
from coklab.matrices import (
    ALTERNATING,
    CongruenceTransform,
    ModMatrix,
    border,
    congruence_apply,
    find_invertible_principal_minor,
    inv_mod,
    random_invertible,
    rank_mod_p,
    reduce_mod,
    schur_complement,
)

from conftest import random_alt, random_sym


def test_reduce_mod_examples():
    assert reduce_mod([[1, 5], [5, -3]], 4).entries.tolist() == [[1, 1], [1, 1]]
    assert reduce_mod([[0, 7], [-7, 0]], 5, ALTERNATING).entries.tolist() == [[0, 2], [3, 0]]
    with pytest.raises(StructureError):
        ModMatrix([[0, 1], [2, 0]], 5)


def test_find_invertible_principal_minor_examples():
    assert find_invertible_principal_minor(ModMatrix(np.diag([1, 3]), 3)) == (0,)
    assert find_invertible_principal_minor(ModMatrix([[0, 1], [1, 0]], 3)) == (0, 1)
    assert find_invertible_principal_minor(ModMatrix(np.zeros((2, 2)), 3)) == ()


def test_schur_complement_examples():
    assert schur_complement(ModMatrix([[1, 1], [1, 1]], 9), [0]).entries.tolist() == [[0]]
    assert schur_complement(ModMatrix([[2, 1], [1, 2]], 9), [0]).entries.tolist() == [[6]]
    assert schur_complement(ModMatrix([[1, 2], [2, 1]], 9), [0]).entries.tolist() == [[6]]


def test_congruence_apply_examples():
    m = ModMatrix(np.diag([1, 3]), 9)
    assert congruence_apply(CongruenceTransform(np.eye(2, dtype=int), 9), m) == m
    swap = CongruenceTransform([[0, 1], [1, 0]], 9)
    assert congruence_apply(swap, m).entries.tolist() == [[3, 0], [0, 1]]
    u = CongruenceTransform([[1, 1], [0, 1]], 9)
    assert congruence_apply(u, ModMatrix([[0, 1], [1, 0]], 9)).entries.tolist() == [[2, 1], [1, 0]]


def test_border_examples():
    assert border(ModMatrix([[1]], 3), [2], 0).entries.tolist() == [[1, 2], [2, 0]]
    a = ModMatrix([[0, 4], [-4, 0]], 5, ALTERNATING)
    assert border(a, [1, 0]).entries.tolist() == [[0, 4, 1], [1, 0, 0], [4, 0, 0]]
    assert border(ModMatrix(np.zeros((0, 0)), 3), [], 2).entries.tolist() == [[2]]


def test_random_invertible_examples():
    u = random_invertible(1, 3, 5)
    assert u.U[0, 0] in (1, 2)
    v = random_invertible(2, 4, 5)
    assert round(np.linalg.det(v.U)) % 2 == 1
    assert np.array_equal(random_invertible(4, 27, 11).U, random_invertible(4, 27, 11).U)


def test_transform_rejects_singular():
    with pytest.raises(DomainError):
        CongruenceTransform([[1, 1], [1, 1]], 4)


def test_json_roundtrip(rng):
    m = ModMatrix(random_sym(rng, 4, 27), 27)
    assert ModMatrix.from_json(m.to_json()) == m
    assert hash(ModMatrix.from_json(m.to_json())) == hash(m)


def test_schur_complement_is_nil(rng):
    for _ in range(1000):
        p = int(rng.choice([2, 3, 5]))
        e = int(rng.integers(1, 4))
        n = int(rng.integers(1, 9))
        q = p**e
        if rng.random() < 0.5:
            m = ModMatrix(random_sym(rng, n, q), q)
        else:
            m = ModMatrix(random_alt(rng, n, q), q, ALTERNATING)
        piv = find_invertible_principal_minor(m)
        nil = schur_complement(m, piv)
        assert find_invertible_principal_minor(nil) == ()
        assert not np.any(nil.entries % p)


def test_congruence_composes(rng):
    for _ in range(100):
        m = ModMatrix(random_sym(rng, 4, 25), 25)
        u, v = random_invertible(4, 25, rng), random_invertible(4, 25, rng)
        assert congruence_apply(u, congruence_apply(v, m)) == congruence_apply(u.compose(v), m)


@pytest.mark.parametrize("p", [2, 3])
def test_alternating_rank_even_exhaustive(p):
    for n in range(1, 5):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for vals in itertools.product(range(p), repeat=len(pairs)):
            a = np.zeros((n, n), dtype=np.int64)
            for (i, j), v in zip(pairs, vals):
                a[i, j], a[j, i] = v, -v % p
            m = ModMatrix(a, p, ALTERNATING)
            assert len(find_invertible_principal_minor(m)) % 2 == 0
            assert rank_mod_p(a, p) % 2 == 0


def test_inv_mod_composite(rng):
    for q in (12, 45, 16):
        while True:
            a = rng.integers(0, q, (3, 3))
            try:
                inv = inv_mod(a, q)
                break
            except Exception:
                continue
        assert np.array_equal(a @ inv % q, np.eye(3, dtype=np.int64))
