"""Exposure process: corner snapshots, transition kernels and terminal laws.

The exposure process reveals a random matrix one row and column at a time.
The class of the next corner depends on the current corner only through its
nil part. Write ``U M U^T = diag(B, N)`` with ``B`` invertible and ``N`` nil,
and ``eta = U xi``. Clearing the new border against ``B`` leaves

    [[N, eta_2], [s eta_2^T, z - s eta_1^T B^-1 eta_1]]

with ``s = 1`` for symmetric and ``s = -1`` for alternating matrices, so a
transition only needs a matrix of size ``corank + 1``.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .cokernel import quasi_class
from .errors import BudgetExceeded, DomainError, StructureError
from .limits import (
    OTHER,
    DistributionTable,
    keys_of_batch,
    l_distance,
    nil_space,
    nu_inf_alt_even,
    nu_inf_alt_odd,
    nu_inf_sym,
    reference_table,
)
from .matrices import ALTERNATING, SYMMETRIC, ModMatrix, inv_mod, matmul_mod
from .ring import factorize
from .sampling import EntryDistribution, SeedLike, rng_for, sample_batch

DEFAULT_BUDGET = 10**8
BIG_PRIME = 2**31 - 1
CHUNK = 2000


def enumeration_budget(budget: int | None = None) -> int:
    """Explicit budget, else ``$COKLAB_BUDGET``, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("COKLAB_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


def is_undetermined(key: str) -> bool:
    """Whether any prime part of a key string carries the undetermined tag."""
    return key == OTHER or any(part.split(":")[2].startswith("U") for part in key.split("|"))


def _sign(kind: str) -> int:
    if kind == SYMMETRIC:
        return 1
    if kind == ALTERNATING:
        return -1
    raise StructureError("exposure needs a symmetric or alternating matrix")


def _bordered(m: np.ndarray, xi: np.ndarray, z: np.ndarray, kind: str, q: int) -> np.ndarray:
    """Stack of ``[[M, xi], [s xi^T, z]]`` for rows of ``xi`` and entries of ``z``."""
    s, n = len(xi), m.shape[0]
    out = np.empty((s, n + 1, n + 1), dtype=np.int64)
    out[:, :n, :n] = m
    out[:, :n, n] = xi % q
    out[:, n, :n] = (_sign(kind) * xi) % q
    out[:, n, n] = 0 if kind == ALTERNATING else z % q
    return out


# ------------------------------------------------------------- tables


@dataclass
class TransitionTable:
    """Law of the class of the bordered matrix, given the source class."""

    source: str
    probs: dict[str, Fraction | float]
    size: int
    exact: bool
    counts: dict[str, int] | None = None

    def stderr(self, key: str) -> float:
        if self.exact:
            return 0.0
        q = float(self.probs.get(key, 0))
        return math.sqrt(q * (1 - q) / self.size)

    @property
    def total_mass(self) -> Fraction | float:
        return sum(self.probs.values())

    def as_distribution(self) -> DistributionTable:
        return DistributionTable(dict(self.probs), self.counts, None if self.exact else self.size)

    def to_dict(self) -> dict:
        out = {
            "source": self.source,
            "exact": self.exact,
            "size": self.size,
            "probabilities": {k: float(v) for k, v in sorted(self.probs.items())},
        }
        if self.exact:
            out["fractions"] = {k: str(v) for k, v in sorted(self.probs.items())}
        else:
            out["stderr"] = {k: self.stderr(k) for k in sorted(self.probs)}
        return out


# ---------------------------------------------------- border reduction


class BorderReducer:
    """Maps borders of a fixed matrix mod p^e to small nil-part matrices."""

    def __init__(self, m: ModMatrix) -> None:
        p, e = m.prime_power
        self.p, self.e, self.q, self.kind = p, e, p**e, m.kind
        self.sign = _sign(m.kind)
        a = np.ascontiguousarray(m.entries)
        if m.kind == SYMMETRIC:
            piv, cnt, _zeros, u = _kernels.sym_reduce(a, p, e, True)
            r = sum(1 if piv[i, 0] == 0 else 2 for i in range(int(cnt)) if piv[i, 1] == 0)
        else:
            vals, cnt, _zeros, u = _kernels.alt_reduce(a, p, e, True)
            r = 2 * sum(1 for i in range(int(cnt)) if vals[i] == 0)
        d = matmul_mod(matmul_mod(u, m.entries, self.q), u.T, self.q)
        if np.any(d[:r, r:]):
            raise AssertionError("reduction did not split off the unit part")
        self.u = u
        self.r = r
        self.b_inv = inv_mod(d[:r, :r], self.q) if r else np.zeros((0, 0), dtype=np.int64)
        self.nil = np.ascontiguousarray(d[r:, r:])

    @property
    def corank(self) -> int:
        return self.nil.shape[0]

    def small(self, xi: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
        """Nil-part matrices of the borders given by rows of ``xi``."""
        q, r = self.q, self.r
        xi = np.asarray(xi, dtype=np.int64) % q
        z = np.zeros(len(xi), dtype=np.int64) if z is None or self.kind == ALTERNATING else np.asarray(z) % q
        eta = matmul_mod(xi, self.u.T, q)
        eta1, eta2 = eta[:, :r], eta[:, r:]
        if r and self.kind == SYMMETRIC:
            quad = (matmul_mod(eta1, self.b_inv, q) * eta1 % q).sum(axis=1) % q
            z = (z - quad) % q
        return _bordered(self.nil, eta2, z, self.kind, q)


def _counts_to_table(source: str, counts: Counter, exact: bool) -> TransitionTable:
    total = sum(counts.values())
    if exact:
        probs = {k: Fraction(v, total) for k, v in sorted(counts.items())}
    else:
        probs = {k: v / total for k, v in sorted(counts.items())}
    return TransitionTable(source, probs, total, exact, dict(sorted(counts.items())))


def _digits(start: int, count: int, base: int, width: int) -> np.ndarray:
    idx = np.arange(start, start + count, dtype=np.int64)
    out = np.empty((count, width), dtype=np.int64)
    for c in range(width - 1, -1, -1):
        out[:, c] = idx % base
        idx //= base
    return out


def enumerate_transition(
    m: ModMatrix, budget: int | None = None, method: str = "exhaustive", chunk: int = 20000
) -> TransitionTable:
    """Exact law of the bordered matrix's class under a uniform border.

    ``method="exhaustive"`` visits every ``(xi, z)`` in ``(Z/p^e)^(n+1)``
    (only ``xi`` for alternating input, whose corner is 0). ``method="reduced"``
    visits only the nil-part border, which has the same law.

    Raises:
        BudgetExceeded: if the number of borders exceeds the budget.
    """
    p, e = m.prime_power
    q, n, kind = p**e, m.n, m.kind
    _sign(kind)
    budget = enumeration_budget(budget)
    source = str(quasi_class(m)) if n else "empty"
    if method == "reduced":
        red = BorderReducer(m)
        base, width = red.nil, red.corank
        build = lambda xi, z: _bordered(base, xi, z, kind, q)  # noqa: E731
    elif method == "exhaustive":
        width = n
        build = lambda xi, z: _bordered(m.entries, xi, z, kind, q)  # noqa: E731
    else:
        raise DomainError(f"unknown method {method!r}")
    slots = width + (1 if kind == SYMMETRIC else 0)
    total = q**slots
    if total > budget:
        raise BudgetExceeded(f"{total} borders exceed the enumeration budget {budget}")
    counts: Counter = Counter()
    for start in range(0, total, chunk):
        dig = _digits(start, min(chunk, total - start), q, slots)
        z = dig[:, width] if kind == SYMMETRIC else None
        counts.update(keys_of_batch(build(dig[:, :width], z), p, e, kind))
    return _counts_to_table(source, counts, exact=True)


def _draw(d: EntryDistribution | None, rng: np.random.Generator, size, q: int) -> np.ndarray:
    if d is None:
        return rng.integers(0, q, size=size, dtype=np.int64)
    return d.draw(rng, size) % q


def estimate_transition(
    m: ModMatrix, d: EntryDistribution | None, samples: int, seed: SeedLike = 0, stream: int = 0
) -> TransitionTable:
    """Monte Carlo transition table with border entries drawn from ``d``.

    ``d = None`` draws the border uniformly mod p^e. Border ``i`` uses the
    stream ``(seed, stream, i // CHUNK)``.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    p, e = m.prime_power
    q = p**e
    red = BorderReducer(m)
    counts: Counter = Counter()
    for c, start in enumerate(range(0, samples, CHUNK)):
        k = min(CHUNK, samples - start)
        rng = rng_for(seed, stream, c)
        xi = _draw(d, rng, (k, m.n), q)
        z = _draw(d, rng, k, q)
        counts.update(keys_of_batch(red.small(xi, z), p, e, m.kind))
    return _counts_to_table(str(quasi_class(m)) if m.n else "empty", counts, exact=False)


# ---------------------------------------------------------- terminal laws


def _local_keys(batch: np.ndarray, modulus: int, kind: str) -> list[list[str]]:
    per_prime = []
    for f in factorize(modulus).factors:
        sub = np.ascontiguousarray(batch % f.q)
        per_prime.append(keys_of_batch(sub, f.p, f.e, kind))
    return per_prime


def key_corank(key: str, n: int, kind: str) -> int:
    """Corank mod p read off a single-prime key string."""
    lam = key.split(":")[1].strip("()")
    parts = len([v for v in lam.split(",") if v])
    return parts if kind == SYMMETRIC else 2 * parts + n % 2


@dataclass
class SimulationResult:
    """Empirical terminal law of an n x n random matrix mod a."""

    kind: str
    n: int
    modulus: int
    distribution: str
    samples: int
    table: DistributionTable
    per_prime: dict[int, DistributionTable]
    coranks: dict[int, DistributionTable]
    integer_corank_one: float | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "n": self.n,
            "modulus": self.modulus,
            "distribution": self.distribution,
            "samples": self.samples,
            "table": self.table.to_dict(),
            "per_prime": {str(p): t.to_dict() for p, t in self.per_prime.items()},
            "coranks": {str(p): t.to_dict() for p, t in self.coranks.items()},
        }
        if self.integer_corank_one is not None:
            out["integer_corank_one"] = self.integer_corank_one
        return out


def simulate(
    kind: str,
    n: int,
    d: EntryDistribution | None,
    modulus: int,
    samples: int,
    seed: int = 0,
    stream: int = 0,
) -> SimulationResult:
    """Class law of ``samples`` random n x n matrices reduced mod ``modulus``.

    ``d = None`` samples uniformly mod ``modulus``. For odd alternating size
    the integer corank is certified to be 1 when the rank mod a large prime
    is n - 1.
    """
    _sign(kind)
    primes = factorize(modulus).primes
    keys: Counter = Counter()
    local = {p: Counter() for p in primes}
    cor = {p: Counter() for p in primes}
    one = 0
    for start in range(0, samples, CHUNK):
        k = min(CHUNK, samples - start)
        raw = sample_batch(n, d, kind, seed, stream, start, k, modulus if d is None else None)
        per = _local_keys(raw, modulus, kind)
        for p, ks in zip(primes, per):
            local[p].update(ks)
            cor[p].update(str(key_corank(s, n, kind)) for s in ks)
        keys.update("|".join(t) for t in zip(*per))
        if kind == ALTERNATING and n % 2 == 1:
            one += _count_integer_corank_one(raw, per, n)
    return SimulationResult(
        kind,
        n,
        modulus,
        "uniform" if d is None else d.name,
        samples,
        DistributionTable.from_counts(keys),
        {p: DistributionTable.from_counts(c) for p, c in local.items()},
        {p: DistributionTable.from_counts(c) for p, c in cor.items()},
        one / samples if kind == ALTERNATING and n % 2 == 1 else None,
    )


def _count_integer_corank_one(raw: np.ndarray, per: list[list[str]], n: int) -> int:
    # corank 1 mod any prime already pins the integer corank to 1
    settled = np.array([any(key_corank(ks[i], n, ALTERNATING) == 1 for ks in per) for i in range(len(raw))])
    rest = np.flatnonzero(~settled)
    if len(rest) == 0:
        return int(settled.sum())
    ranks = _kernels.rank_batch(np.ascontiguousarray(raw[rest] % BIG_PRIME), BIG_PRIME)
    return int(settled.sum() + np.sum(ranks == n - 1))


# ---------------------------------------------------------- exposure runs


@dataclass
class ExposureRun:
    """Snapshots of the leading corners of one sampled matrix."""

    kind: str
    modulus: int
    distribution: str
    n: int
    snapshots: tuple[int, ...]
    keys: tuple[str, ...]
    coranks: dict[int, tuple[int, ...]]
    warmup: tuple[bool, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "modulus": self.modulus,
            "distribution": self.distribution,
            "n": self.n,
            "snapshots": list(self.snapshots),
            "keys": list(self.keys),
            "coranks": {str(p): list(v) for p, v in self.coranks.items()},
            "warmup": list(self.warmup),
        }


def _check_increments(cor: np.ndarray) -> None:
    steps = np.diff(cor)
    if np.any(np.abs(steps) > 1):
        raise AssertionError(f"corank jumped by more than 1 between consecutive corners: {steps.tolist()}")


def run_exposure(
    n: int,
    d: EntryDistribution | None,
    a: int,
    snapshots: Sequence[int] | None = None,
    seed: int = 0,
    kind: str = SYMMETRIC,
    stream: int = 0,
    index: int = 0,
) -> ExposureRun:
    """Sample one matrix and record the class of each requested corner.

    Corners before ``max(1, n // 20)`` are computed but flagged as warm-up.
    """
    _sign(kind)
    snaps = tuple(range(1, n + 1)) if snapshots is None else tuple(int(t) for t in snapshots)
    if any(t < 1 or t > n for t in snaps) or list(snaps) != sorted(set(snaps)):
        raise DomainError("snapshots must be increasing indices in [1, n]")
    full = sample_batch(n, d, kind, seed, stream, index, 1, a if d is None else None)[0] % a
    coranks = {}
    for p in factorize(a).primes:
        cor = _kernels.corner_coranks(np.ascontiguousarray(full % p), p, kind == ALTERNATING)
        _check_increments(cor)
        coranks[p] = tuple(int(cor[t]) for t in snaps)
    keys = tuple(str(quasi_class(ModMatrix(full[:t, :t], a, kind))) for t in snaps)
    start = max(1, n // 20)
    return ExposureRun(kind, a, "uniform" if d is None else d.name, n, snaps, keys, coranks, tuple(t < start for t in snaps))


@dataclass
class WalkReport:
    """Corank decrease frequencies along the exposure process."""

    p: int
    n: int
    runs: int
    steps: tuple[int, int]
    decrease_given_one: tuple[int, int]
    decrease_given_many: tuple[int, int]
    increments: dict[int, int]

    @staticmethod
    def _freq(c: tuple[int, int]) -> float:
        return c[0] / c[1] if c[1] else float("nan")

    @property
    def p_decrease_one(self) -> float:
        return self._freq(self.decrease_given_one)

    @property
    def p_decrease_many(self) -> float:
        return self._freq(self.decrease_given_many)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "runs": self.runs,
            "steps": list(self.steps),
            "decrease_given_corank_1": {"count": self.decrease_given_one[0], "total": self.decrease_given_one[1], "frequency": self.p_decrease_one},
            "decrease_given_corank_ge_2": {"count": self.decrease_given_many[0], "total": self.decrease_given_many[1], "frequency": self.p_decrease_many},
            "increments": {str(k): v for k, v in sorted(self.increments.items())},
        }


def corank_walk(n: int, d: EntryDistribution | None, p: int, seed: int = 0, runs: int = 1000, stream: int = 0) -> WalkReport:
    """Corank transitions mod p between corners t and t+1, for n/2 <= t < n.

    ``d = None`` uses entries uniform mod p. Every increment over the whole
    sweep is checked to lie in {-1, 0, 1}.
    """
    lo = n // 2
    one = [0, 0]
    many = [0, 0]
    inc: Counter = Counter()
    for start in range(0, runs, CHUNK):
        k = min(CHUNK, runs - start)
        batch = sample_batch(n, d, SYMMETRIC, seed, stream, start, k, p if d is None else None) % p
        cor = _kernels.corner_coranks_batch(np.ascontiguousarray(batch), p, False)
        steps = np.diff(cor, axis=1)
        if np.any(np.abs(steps) > 1):
            raise AssertionError("corank increment outside {-1, 0, 1}")
        before, step = cor[:, lo:n], steps[:, lo:n]
        inc.update(step.ravel().tolist())
        for sel, acc in ((before == 1, one), (before >= 2, many)):
            acc[0] += int(np.sum(step[sel] == -1))
            acc[1] += int(np.sum(sel))
    return WalkReport(p, n, runs, (lo, n), tuple(one), tuple(many), dict(inc))


# ---------------------------------------------------------- joint corners


SEP = " > "


@dataclass
class JointReport:
    """Empirical and reference joint law of the outermost corner classes."""

    n: int
    j: int
    modulus: int
    kind: str
    empirical: DistributionTable
    reference: DistributionTable | None
    distance: float | None
    odd_corank_one: float | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "j": self.j,
            "modulus": self.modulus,
            "kind": self.kind,
            "empirical": self.empirical.to_dict(),
            "reference": None if self.reference is None else self.reference.to_dict(),
            "distance": self.distance,
        }
        if self.odd_corank_one is not None:
            out["odd_corank_one"] = self.odd_corank_one
        return out


class _Chain:
    """Exact class chain mod p^e built from representatives of each class."""

    def __init__(self, p: int, e: int, kind: str, budget: int | None) -> None:
        self.p, self.e, self.kind, self.budget = p, e, kind, budget
        self.reps: dict[str, np.ndarray] = {}
        self.cache: dict[str, dict[str, Fraction] | None] = {}

    def remember(self, mats: np.ndarray) -> None:
        for key, mat in zip(keys_of_batch(mats, self.p, self.e, self.kind), mats):
            self.reps.setdefault(key, mat)

    def step(self, key: str) -> dict[str, Fraction] | None:
        if key in self.cache:
            return self.cache[key]
        out = None
        # at p = 2 an undetermined key does not fix the class mod 2^e
        if key in self.reps and not (self.p == 2 and self.kind == SYMMETRIC and is_undetermined(key)):
            m = ModMatrix(self.reps[key], self.p**self.e, self.kind)
            try:
                red = BorderReducer(m)
                q, w = self.p**self.e, red.corank
                slots = w + (1 if self.kind == SYMMETRIC else 0)
                if q**slots <= enumeration_budget(self.budget):
                    dig = _digits(0, q**slots, q, slots)
                    mats = _bordered(red.nil, dig[:, :w], dig[:, w] if self.kind == SYMMETRIC else None, self.kind, q)
                    self.remember(mats)
                    out = {k: v for k, v in enumerate_transition(m, self.budget, "reduced").probs.items()}
            except BudgetExceeded:
                out = None
        self.cache[key] = out
        return out


def joint_reference(n: int, j: int, p: int, e: int, kind: str, k_max: int = 3, budget: int | None = None) -> DistributionTable:
    """Limit law of the classes of corners n-j+1 .. n as a class chain.

    The first corner follows the limiting law; each later corner follows the
    exact one-step kernel from a representative of the previous class. Paths
    through classes without a representative or kernel go to ``"other"``.
    """
    first = n - j + 1
    chain = _Chain(p, e, kind, budget)
    parity = first % 2 if kind == ALTERNATING else 0
    sizes = range(k_max + 1) if kind == SYMMETRIC else [2 * k + parity for k in range(k_max + 1)]
    for s in sizes:
        chain.remember(nil_space(s, p, e, kind, enumeration_budget(budget)))
    start = reference_table(kind, p, e, k_max, parity)
    paths: dict[str, float] = {k: float(v) for k, v in start.probs.items()}
    for _ in range(j - 1):
        nxt: dict[str, float] = {}
        for path, w in paths.items():
            last = path.split(SEP)[-1]
            kernel = None if last == OTHER else chain.step(last)
            if kernel is None:
                nxt[OTHER] = nxt.get(OTHER, 0.0) + w
                continue
            for k, v in kernel.items():
                nxt[path + SEP + k] = nxt.get(path + SEP + k, 0.0) + w * float(v)
        paths = nxt
    return DistributionTable(dict(sorted(paths.items())))


def joint_corners(
    n: int,
    j: int,
    d: EntryDistribution | None,
    modulus: int,
    samples: int,
    seed: int = 0,
    kind: str = SYMMETRIC,
    k_max: int = 3,
    stream: int = 0,
) -> JointReport:
    """Joint law of the classes of the j outermost corners (sizes n-j+1 .. n).

    A reference chain is attached when ``modulus`` is a prime power. For odd
    alternating corners the share with integer corank exactly 1 is reported.
    """
    if not 1 <= j <= min(5, n):
        raise DomainError("need 1 <= j <= min(5, n)")
    _sign(kind)
    mod = factorize(modulus)
    counts: Counter = Counter()
    odd_one = odd_total = 0
    for start in range(0, samples, CHUNK):
        k = min(CHUNK, samples - start)
        raw = sample_batch(n, d, kind, seed, stream, start, k, modulus if d is None else None)
        cols = []
        for t in range(n - j + 1, n + 1):
            corner = np.ascontiguousarray(raw[:, :t, :t])
            per = _local_keys(corner, modulus, kind)
            cols.append(["|".join(x) for x in zip(*per)])
            if kind == ALTERNATING and t % 2 == 1:
                odd_one += _count_integer_corank_one(corner, per, t)
                odd_total += k
        counts.update(SEP.join(x) for x in zip(*cols))
    emp = DistributionTable.from_counts(counts)
    ref = dist = None
    if len(mod.factors) == 1:
        f = mod.factors[0]
        ref = joint_reference(n, j, f.p, f.e, kind, k_max)
        dist = l_distance(emp, ref)
    return JointReport(n, j, modulus, kind, emp, ref, dist, odd_one / odd_total if odd_total else None)


# ---------------------------------------------------------- coupling


def product_reference(kind: str, modulus: int, n: int, k_max: int = 3) -> DistributionTable:
    """Limiting class law mod ``modulus``, independent across primes."""
    tables = [reference_table(kind, f.p, f.e, k_max, n % 2 if kind == ALTERNATING else 0) for f in factorize(modulus).factors]
    probs: dict[str, float] = {}
    for combo in itertools.product(*[list(t.probs.items()) for t in tables]):
        keys = [k for k, _ in combo]
        key = OTHER if OTHER in keys else "|".join(keys)
        probs[key] = probs.get(key, 0.0) + math.prod(float(v) for _, v in combo)
    return DistributionTable(dict(sorted(probs.items())))


@dataclass
class CouplingReport:
    """Distances between the balanced law, the uniform law and the limit."""

    balanced: SimulationResult
    uniform: SimulationResult
    reference: DistributionTable
    distances: dict[str, float]
    undetermined_mass: dict[str, float]
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {
            "balanced": self.balanced.to_dict(),
            "uniform": self.uniform.to_dict(),
            "reference": self.reference.to_dict(),
            "distances": self.distances,
            "undetermined_mass": self.undetermined_mass,
        }


def determinate_part(t: DistributionTable) -> dict[str, float]:
    return {k: float(v) for k, v in t.probs.items() if not is_undetermined(k)}


def coupling_compare(
    n: int,
    d: EntryDistribution,
    a: int,
    samples: int,
    seed: int = 0,
    kind: str = SYMMETRIC,
    k_max: int = 3,
) -> CouplingReport:
    """Compare the balanced-entry law, the uniform-mod-a law and the limit.

    Undetermined keys are left out of every distance; their mass is reported.
    """
    t0 = time.perf_counter()
    bal = simulate(kind, n, d, a, samples, seed, stream=1)
    uni = simulate(kind, n, None, a, samples, seed, stream=2)
    ref = product_reference(kind, a, n, k_max)
    parts = {"balanced": determinate_part(bal.table), "uniform": determinate_part(uni.table), "reference": determinate_part(ref)}
    dist = {
        "balanced-uniform": l_distance(parts["balanced"], parts["uniform"]),
        "balanced-reference": l_distance(parts["balanced"], parts["reference"]),
        "uniform-reference": l_distance(parts["uniform"], parts["reference"]),
    }
    und = {name: 1.0 - sum(v.values()) for name, v in parts.items()}
    return CouplingReport(bal, uni, ref, dist, und, time.perf_counter() - t0)


def corank_reference(kind: str, p: int, n: int, k_max: int = 6) -> dict[str, float]:
    """Limiting corank-mod-p law as a table keyed by the corank string."""
    if kind == SYMMETRIC:
        return {str(k): nu_inf_sym(p, k) for k in range(k_max + 1)}
    if n % 2 == 0:
        return {str(2 * k): nu_inf_alt_even(p, k) for k in range(k_max + 1)}
    return {str(2 * k + 1): nu_inf_alt_odd(p, k) for k in range(k_max + 1)}


def corank_distance(emp: DistributionTable, ref: Mapping[str, float]) -> float:
    return l_distance(emp, dict(ref))
