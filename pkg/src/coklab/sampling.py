"""Entry distributions and seeded samplers for random integer matrices.

Every sample draws from its own counter-based stream, keyed by the master
seed and a derivation path ``(experiment, sample index)``. Results therefore
do not depend on how samples are split across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .matrices import ALTERNATING, SYMMETRIC, ModMatrix
from .ring import is_prime, primes_up_to

SeedLike = int | np.random.Generator | tuple | None


@dataclass(frozen=True)
class EntryDistribution:
    """Finitely supported law of one integer entry."""

    support: tuple[int, ...]
    probs: tuple[float, ...]
    name: str = ""

    def __post_init__(self) -> None:
        sup = tuple(int(v) for v in self.support)
        pr = tuple(float(v) for v in self.probs)
        if not sup or len(sup) != len(pr):
            raise DomainError("support and probs must be nonempty and of equal length")
        if len(set(sup)) != len(sup):
            raise DomainError("support values must be distinct")
        if any(v < 0 for v in pr) or abs(sum(pr) - 1) > 1e-12:
            raise DomainError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "probs", pr)
        object.__setattr__(self, "_cum", np.cumsum(pr))

    @classmethod
    def bernoulli(cls, q: float) -> "EntryDistribution":
        return cls((0, 1), (1 - q, q), f"bernoulli:{q}")

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "EntryDistribution":
        if hi < lo:
            raise DomainError("empty uniform range")
        k = hi - lo + 1
        return cls(tuple(range(lo, hi + 1)), (1 / k,) * k, f"uniform:{lo}..{hi}")

    @classmethod
    def point(cls, v: int) -> "EntryDistribution":
        return cls((v,), (1.0,), f"point:{v}")

    @classmethod
    def parse(cls, spec: "str | dict | EntryDistribution") -> "EntryDistribution":
        """Build from a preset name or the distribution JSON object.

        Presets: ``bernoulli:q``, ``uniform:l..r``, ``rademacher01``,
        ``point:v``.
        """
        if isinstance(spec, EntryDistribution):
            return spec
        if isinstance(spec, str) and spec.lstrip().startswith("{"):
            spec = json.loads(spec)
        if isinstance(spec, dict):
            if "preset" in spec:
                return cls.parse(spec["preset"])
            return cls(tuple(spec["support"]), tuple(spec["probs"]), spec.get("name", "custom"))
        name, _, arg = str(spec).partition(":")
        try:
            if name == "bernoulli":
                return cls.bernoulli(float(arg))
            if name == "uniform":
                lo, hi = arg.split("..")
                return cls.uniform(int(lo), int(hi))
            if name == "point":
                return cls.point(int(arg))
            if name == "rademacher01":
                return cls((-1, 0, 1), (0.25, 0.5, 0.25), "rademacher01")
        except ValueError:
            pass
        raise DomainError(f"unknown distribution {spec!r}")

    def to_dict(self) -> dict:
        return {"name": self.name, "support": list(self.support), "probs": list(self.probs)}

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        idx = np.searchsorted(self._cum, rng.random(size), side="right")
        idx = np.minimum(idx, len(self.support) - 1)
        return np.asarray(self.support, dtype=np.int64)[idx]

    def residue_masses(self, p: int) -> np.ndarray:
        out = np.zeros(p)
        for v, w in zip(self.support, self.probs):
            out[v % p] += w
        return out


def epsilon_of(d: EntryDistribution, prime_bound: int | None = None, extra_primes: Sequence[int] = ()) -> float:
    """Largest eps such that no residue class mod any prime has mass above 1 - eps.

    Primes above the support diameter see every support point in its own
    class, so scanning up to the diameter, one prime beyond it and any extra
    primes covers every prime.
    """
    sup = d.support
    diam = max(sup) - min(sup)
    bound = diam if prime_bound is None else prime_bound
    primes = set(primes_up_to(max(bound, 2)))
    nxt = max(bound, 1) + 1
    while not is_prime(nxt):
        nxt += 1
    primes.add(nxt)
    primes.update(int(p) for p in extra_primes)
    return float(min(1 - d.residue_masses(p).max() for p in sorted(primes)))


def rng_for(seed: SeedLike, *path: int) -> np.random.Generator:
    """Independent stream for ``(seed, path)``; a Generator passes through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        seed, path = seed[0], tuple(seed[1:]) + path
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(0 if seed is None else int(seed), spawn_key=tuple(int(v) for v in path))))


def _fill(n: int, upper: np.ndarray, kind: str) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.int64)
    if kind == SYMMETRIC:
        iu = np.triu_indices(n)
        a[iu] = upper
        a = a + np.triu(a, 1).T
    else:
        iu = np.triu_indices(n, 1)
        a[iu] = upper
        a = a - a.T
    return a


def sample_sym(n: int, d: EntryDistribution, seed: SeedLike = None) -> np.ndarray:
    """Symmetric integer matrix with iid entries on and above the diagonal."""
    rng = rng_for(seed)
    return _fill(n, d.draw(rng, n * (n + 1) // 2), SYMMETRIC)


def sample_alt(n: int, d: EntryDistribution, seed: SeedLike = None) -> np.ndarray:
    """Alternating integer matrix with iid entries above the diagonal."""
    rng = rng_for(seed)
    return _fill(n, d.draw(rng, n * (n - 1) // 2), ALTERNATING)


def sample_uniform_mod(n: int, a: int, kind: str = SYMMETRIC, seed: SeedLike = None) -> ModMatrix:
    """Uniform matrix over Z/a of the given kind."""
    rng = rng_for(seed)
    m = n * (n + 1) // 2 if kind == SYMMETRIC else n * (n - 1) // 2
    upper = rng.integers(0, a, size=m, dtype=np.int64)
    return ModMatrix(_fill(n, upper, kind) % a, a, kind)


def sample_batch(
    n: int,
    d: EntryDistribution | None,
    kind: str,
    seed: int,
    stream: int,
    start: int,
    count: int,
    modulus: int | None = None,
) -> np.ndarray:
    """Stack of ``count`` matrices for sample indices ``start .. start+count-1``.

    Sample ``i`` uses the stream ``(seed, stream, i)``. With ``d = None`` the
    entries are uniform mod ``modulus``. Entries are reduced mod ``modulus``
    when one is given.
    """
    out = np.empty((count, n, n), dtype=np.int64)
    for k in range(count):
        rng = rng_for(seed, stream, start + k)
        if d is None:
            m = n * (n + 1) // 2 if kind == SYMMETRIC else n * (n - 1) // 2
            upper = rng.integers(0, modulus, size=m, dtype=np.int64)
        else:
            upper = d.draw(rng, n * (n + 1) // 2 if kind == SYMMETRIC else n * (n - 1) // 2)
        out[k] = _fill(n, upper, kind)
    if modulus is not None:
        out %= modulus
    return out
