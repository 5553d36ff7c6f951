import math

import numpy as np
import pytest

from coklab.audit import (
    ALT_ALL,
    PASS_EXHAUSTIVE,
    PASS_SEARCH,
    SYM_WINDOW,
    VIOLATED,
    AuditParams,
    char_bound_check,
    char_suite,
    check_corank_event,
    check_orthogonality_event,
    check_sdagger,
    entropy,
    entropy_identities,
    hamming_bound_check,
    hamming_grid,
    hamming_vol,
    inverse_diagonal_check,
    principal_minor_census,
    revalidate,
)
from coklab.errors import DomainError, NotApplicable
from coklab.matrices import ModMatrix
from coklab.sampling import EntryDistribution

from conftest import random_alt, random_sym

ALL_ROWS = AuditParams(window_start=0, gamma=0.25)


def test_corank_event_examples():
    assert check_corank_event(np.eye(16, dtype=int), 3).verdict == PASS_EXHAUSTIVE
    rep = check_corank_event(np.zeros((16, 16), dtype=int), 2)
    assert rep.verdict == VIOLATED and rep.witness["corank"] == 16
    assert revalidate(rep, np.zeros((16, 16), dtype=int))
    block = np.diag([1] * 14 + [0, 0])
    rep = check_corank_event(ModMatrix(block, 5), 5)
    assert rep.passed and rep.detail["corank"] == 2
    assert check_corank_event(block, 2, c=1 / 4, event="S1p").passed


def test_orthogonality_examples():
    rep = check_orthogonality_event(np.eye(12, dtype=int), 2, ALL_ROWS)
    assert rep.verdict == VIOLATED
    assert rep.witness["xi"] == [1] + [0] * 11 and rep.witness["I"] == [0] and rep.witness["weight"] == 1
    rep = check_orthogonality_event(np.zeros((12, 12), dtype=int), 2, ALL_ROWS, mode=ALT_ALL)
    assert rep.event == "A2" and rep.witness["xi"][0] == 1 and rep.witness["I"] == []


def test_orthogonality_dense_passes(rng):
    # at n = 12 a dense row set meets about n/2 rows, below n^(3/4), so only a
    # tight I-bound separates dense from sparse
    params = AuditParams(window_start=0, beta=1 / 4, gamma=0.1)
    passed = 0
    for _ in range(100):
        rep = check_orthogonality_event(random_sym(rng, 12, 2), 2, params)
        passed += rep.verdict == PASS_EXHAUSTIVE
    assert passed >= 85


def test_default_parameters_are_vacuous_at_small_n():
    rep = check_orthogonality_event(np.zeros((14, 14), dtype=int), 2)
    assert rep.verdict == PASS_EXHAUSTIVE and rep.detail["vacuous"]


def test_budget_downgrades_to_search():
    rep = check_orthogonality_event(np.eye(30, dtype=int), 3, AuditParams(window_start=0, gamma=0.5), budget=1000)
    assert rep.verdict == VIOLATED and rep.detail["max_weight"] == 3
    rep = check_orthogonality_event(np.ones((30, 30), dtype=int) - np.eye(30, dtype=int), 3, AuditParams(gamma=0.5), budget=10)
    assert rep.verdict in (PASS_SEARCH, VIOLATED)


@pytest.mark.parametrize("p,n_max", [(2, 14), (3, 9)])
def test_exhaustive_and_search_agree(rng, p, n_max):
    params = AuditParams(window_start=0, gamma=0.4)
    for _ in range(30):
        n = int(rng.integers(6, n_max + 1))
        sparse = rng.random((n, n)) < rng.uniform(0.02, 0.4)
        a = random_sym(rng, n, p) * np.triu(sparse)
        a = (np.triu(a) + np.triu(a, 1).T) % p
        for mode, mat in ((SYM_WINDOW, a), (ALT_ALL, random_alt(rng, n, p) * sparse % p)):
            full = check_orthogonality_event(mat, p, params, mode)
            part = check_orthogonality_event(mat, p, params, mode, exhaustive=False)
            if part.verdict == VIOLATED:
                assert full.witness == part.witness
            elif full.verdict == VIOLATED:
                assert full.witness["weight"] > 3 and part.verdict == PASS_SEARCH
            for rep in (full, part):
                if rep.verdict == VIOLATED:
                    assert revalidate(rep, mat)


def test_sdagger_examples():
    assert check_sdagger(np.zeros((9, 9), dtype=int)).verdict == PASS_EXHAUSTIVE
    rep = check_sdagger(np.eye(16, dtype=int))
    assert rep.verdict == VIOLATED and rep.witness["I2"] == [0]
    assert revalidate(rep, np.eye(16, dtype=int))
    # with I2 empty only the all-ones inverse diagonal is tested
    assert check_sdagger(np.eye(16, dtype=int), max_size=0).passed


def test_sdagger_dense_mostly_passes(rng):
    passed = sum(check_sdagger(random_sym(rng, 16, 2)).passed for _ in range(30))
    assert passed >= 18


def test_principal_minor_census_examples():
    assert principal_minor_census(np.eye(5, dtype=int)) == 5
    assert principal_minor_census(np.zeros((4, 4), dtype=int)) == 0
    assert principal_minor_census(np.array([[0, 1], [1, 0]])) == 0


def test_inverse_diagonal_lemma():
    total = 0
    for n in range(1, 5):
        checked, failures = inverse_diagonal_check(n)
        assert failures == 0
        total += checked
    assert total == 481


def test_char_bound_examples():
    lhs, rhs, ok = char_bound_check(EntryDistribution.bernoulli(0.5), 2)
    assert lhs == pytest.approx(0, abs=1e-12) and rhs == pytest.approx(0.88250, abs=5e-6) and ok
    lhs, rhs, ok = char_bound_check(EntryDistribution((0, 1), (0.6, 0.4)), 2)
    assert lhs == pytest.approx(0.2) and rhs == pytest.approx(0.90484, abs=5e-6) and ok
    with pytest.raises(NotApplicable):
        char_bound_check(EntryDistribution.point(3), 5)


def test_char_suite_all_pass():
    res = char_suite(500, seed=1)
    assert res["passed"] == res["total"] == 500 and res["min_margin"] >= 0


def test_entropy_and_volume():
    assert entropy(2, 0.5) == pytest.approx(1)
    assert entropy_identities()["passed"]
    assert hamming_vol(2, 4, 1) == 5
    assert hamming_vol(3, 3, 2) == 19
    assert all(hamming_vol(p, n, n) == p**n for p in (2, 3, 5) for n in range(8))
    with pytest.raises(DomainError):
        entropy(3, 1.0)
    with pytest.raises(DomainError):
        hamming_bound_check(2, 10, 0.6)


def test_hamming_grid_passes():
    res = hamming_grid()
    assert res["failures"] == [] and res["total"] == res["passed"] > 1000


def test_hamming_bound_margin():
    vol, bound, ok = hamming_bound_check(3, 30, 0.5)
    assert ok and vol <= bound and float(bound) < 3**30
    assert math.isclose(float(bound), 3 ** (entropy(3, 0.5) * 30), rel_tol=1e-9)
