import numpy as np
import pytest

from coklab.errors import DomainError
from coklab.matrices import ALTERNATING, SYMMETRIC, ModMatrix
from coklab.sampling import (
    EntryDistribution,
    epsilon_of,
    rng_for,
    sample_alt,
    sample_batch,
    sample_sym,
    sample_uniform_mod,
)

PRESETS = ["bernoulli:0.5", "bernoulli:0.1", "uniform:0..2", "uniform:-3..3", "rademacher01", "point:5"]


def test_epsilon_examples():
    assert epsilon_of(EntryDistribution.bernoulli(0.5)) == pytest.approx(0.5)
    assert epsilon_of(EntryDistribution.uniform(0, 2)) == pytest.approx(1 / 3)
    assert epsilon_of(EntryDistribution.point(5)) == 0


@pytest.mark.parametrize("q", [0.05, 0.3, 0.5, 0.8])
def test_epsilon_of_bernoulli(q):
    assert epsilon_of(EntryDistribution.parse(f"bernoulli:{q}")) == pytest.approx(min(q, 1 - q))


@pytest.mark.parametrize("name", PRESETS)
def test_presets_positive_unless_point(name):
    d = EntryDistribution.parse(name)
    eps = epsilon_of(d)
    assert (eps == 0) == (len(d.support) == 1)


def test_epsilon_scans_extra_primes():
    # residues mod 7 collide only for a support wider than 7
    d = EntryDistribution((0, 7), (0.5, 0.5))
    assert epsilon_of(d) == 0
    assert epsilon_of(EntryDistribution((0, 1), (0.5, 0.5)), extra_primes=[101]) == pytest.approx(0.5)


def test_distribution_json_forms():
    a = EntryDistribution.parse({"support": [-1, 0, 1], "probs": [0.25, 0.5, 0.25]})
    b = EntryDistribution.parse({"preset": "rademacher01"})
    assert a.support == b.support and a.probs == b.probs
    with pytest.raises(DomainError):
        EntryDistribution((0, 0), (0.5, 0.5))
    with pytest.raises(DomainError):
        EntryDistribution((0, 1), (0.5, 0.6))
    with pytest.raises(DomainError):
        EntryDistribution.parse("gaussian")


def test_sample_sym_examples():
    assert not sample_sym(4, EntryDistribution.point(0), 1).any()
    d = EntryDistribution.parse("uniform:-2..2")
    assert np.array_equal(sample_sym(6, d, 7), sample_sym(6, d, 7))
    a = sample_sym(6, d, 7)
    assert np.array_equal(a, a.T)


def test_sample_sym_entry_frequencies():
    d = EntryDistribution((0, 1, 5), (0.2, 0.5, 0.3))
    a = sample_sym(446, d, 3)  # about 10^5 independent entries
    upper = a[np.triu_indices(446)]
    n = len(upper)
    for v, q in zip(d.support, d.probs):
        sigma = np.sqrt(n * q * (1 - q))
        assert abs((upper == v).sum() - n * q) < 3 * sigma


def test_sample_alt_examples():
    a = sample_alt(4, EntryDistribution.point(1), 0)
    iu = np.triu_indices(4, 1)
    assert (a[iu] == 1).all() and (a.T[iu] == -1).all()
    b = sample_alt(7, EntryDistribution.parse("rademacher01"), 5)
    assert not np.diag(b).any() and np.array_equal(b, -b.T)
    assert np.array_equal(b, sample_alt(7, EntryDistribution.parse("rademacher01"), 5))


def test_sample_uniform_mod_examples():
    vals = [int(sample_uniform_mod(1, 2, SYMMETRIC, (11, i)).entries[0, 0]) for i in range(4000)]
    assert abs(sum(vals) - 2000) < 3 * np.sqrt(1000)
    m = sample_uniform_mod(5, 12, ALTERNATING, 4)
    assert isinstance(m, ModMatrix) and m.kind == ALTERNATING
    assert np.array_equal(m.entries, sample_uniform_mod(5, 12, ALTERNATING, 4).entries)


def test_crt_reductions_independent():
    batch = sample_batch(2, None, SYMMETRIC, 17, 0, 0, 34000, modulus=6)
    x = batch[:, np.triu_indices(2)[0], np.triu_indices(2)[1]].ravel()
    cells = np.bincount((x % 2) * 3 + x % 3, minlength=6)
    expect = len(x) / 6
    chi2 = float(((cells - expect) ** 2 / expect).sum())
    assert chi2 < 20.52  # 0.999 quantile, 5 degrees of freedom


def test_batch_is_split_invariant():
    d = EntryDistribution.bernoulli(0.5)
    whole = sample_batch(5, d, ALTERNATING, 9, 2, 0, 10)
    parts = np.concatenate([sample_batch(5, d, ALTERNATING, 9, 2, 0, 4), sample_batch(5, d, ALTERNATING, 9, 2, 4, 6)])
    assert np.array_equal(whole, parts)
    other = sample_batch(5, d, ALTERNATING, 9, 3, 0, 10)
    assert not np.array_equal(whole, other)


def test_rng_paths_differ():
    a = rng_for(1, 0, 1).integers(0, 2**62)
    b = rng_for(1, 1, 0).integers(0, 2**62)
    assert a != b and a == rng_for((1, 0), 1).integers(0, 2**62)


def test_kind_invariants_hold_on_every_draw():
    for name in PRESETS:
        d = EntryDistribution.parse(name)
        for i in range(20):
            ModMatrix(sample_sym(5, d, (i,)), None)
            ModMatrix(sample_alt(5, d, (i,)), None, ALTERNATING)
