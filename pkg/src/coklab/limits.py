"""Limiting laws, corank laws, distribution tables and distances.

Reference tables for whole class distributions are built from the corank law
times the exact law of the nil part: given corank k, the nil part of a
uniform matrix mod p^e is a uniform element of ``Sym_k(pZ/p^e)`` (or the
alternating analogue). Enumerating that space gives the limiting mass of
every class at modulus p^e, undetermined classes included.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .cokernel import (
    GroupType,
    PairedClassKey,
    CompositeKey,
    alt_key_from_reduction,
    aut_of_key,
    sp_count,
    sym_key_from_pivots,
)
from .errors import BudgetExceeded, DomainError
from .ring import Modulus, modulus_from_primes

Number = float | Fraction


@dataclass(frozen=True)
class LimitSpec:
    primes: tuple[int, ...] = ()
    K: int = 40
    tau: float = 1e-12


@dataclass
class DistributionTable:
    """Finitely supported law over class-key strings.

    ``counts`` is set for empirical tables; ``samples`` is their total.
    """

    probs: dict[str, Number] = field(default_factory=dict)
    counts: dict[str, int] | None = None
    samples: int | None = None

    @classmethod
    def from_counts(cls, counts: Mapping[str, int] | Iterable[str], samples: int | None = None) -> "DistributionTable":
        c = Counter(counts) if not isinstance(counts, Mapping) else Counter(dict(counts))
        total = sum(c.values()) if samples is None else samples
        if total <= 0:
            raise DomainError("empty sample")
        return cls({k: v / total for k, v in sorted(c.items())}, dict(sorted(c.items())), total)

    def merge(self, other: "DistributionTable") -> "DistributionTable":
        """Pool two empirical tables (associative, order independent)."""
        if self.counts is None or other.counts is None:
            raise DomainError("only empirical tables can be merged")
        return DistributionTable.from_counts(Counter(self.counts) + Counter(other.counts))

    @property
    def total_mass(self) -> Number:
        return sum(self.probs.values())

    def get(self, key: str) -> Number:
        return self.probs.get(key, 0)

    def stderr(self, key: str) -> float:
        if not self.samples:
            return 0.0
        q = float(self.get(key))
        return math.sqrt(q * (1 - q) / self.samples)

    def restrict(self, keep) -> "DistributionTable":
        """Sub-table on the keys for which ``keep(key)`` holds (not renormalised)."""
        probs = {k: v for k, v in self.probs.items() if keep(k)}
        counts = None if self.counts is None else {k: v for k, v in self.counts.items() if keep(k)}
        return DistributionTable(probs, counts, self.samples)

    def coarsen(self, label) -> "DistributionTable":
        """Push the law forward along ``label(key) -> new key``."""
        probs: dict[str, Number] = {}
        counts: dict[str, int] | None = None if self.counts is None else {}
        for k, v in self.probs.items():
            nk = label(k)
            probs[nk] = probs.get(nk, 0) + v
            if counts is not None:
                counts[nk] = counts.get(nk, 0) + self.counts.get(k, 0)
        return DistributionTable(dict(sorted(probs.items())), counts, self.samples)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "probability", "count"])
        for k in sorted(self.probs):
            cnt = "" if self.counts is None else self.counts.get(k, 0)
            w.writerow([k, repr(float(self.probs[k])), cnt])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out: dict = {"probabilities": {k: float(v) for k, v in sorted(self.probs.items())}}
        if any(isinstance(v, Fraction) for v in self.probs.values()):
            out["exact"] = {k: str(v) for k, v in sorted(self.probs.items())}
        if self.counts is not None:
            out["counts"] = dict(sorted(self.counts.items()))
            out["samples"] = self.samples
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def l_distance(t1: DistributionTable | Mapping[str, Number], t2: DistributionTable | Mapping[str, Number], q: float = 1) -> float:
    """``(sum |t1 - t2|^q)^(1/q)`` over the union of keys."""
    if q < 1:
        raise DomainError("q must be >= 1")
    a = t1.probs if isinstance(t1, DistributionTable) else t1
    b = t2.probs if isinstance(t2, DistributionTable) else t2
    total = sum(abs(float(a.get(k, 0)) - float(b.get(k, 0))) ** q for k in set(a) | set(b))
    return total ** (1 / q)


# ------------------------------------------------------------ infinite products


def _product(p: int, first: int, K: int) -> tuple[float, float]:
    # prod_{k=1..K} (1 - p^(first - 2k)) and the tail sum bound
    val = 1.0
    for k in range(1, K + 1):
        val *= 1 - float(p) ** (first - 2 * k)
    tail = float(p) ** (first - 2 * (K + 1)) / (1 - float(p) ** -2)
    return val, tail


def product_sym(p: int, K: int = 40) -> tuple[float, float]:
    """``prod_{k=1..K} (1 - p^(1-2k))`` and a bound on the truncation error.

    >>> round(product_sym(3)[0], 5)
    0.639
    """
    if p < 2 or K < 1:
        raise DomainError("need p >= 2 and K >= 1")
    return _product(p, 1, K)


def product_alt_odd(p: int, K: int = 40) -> tuple[float, float]:
    """``prod_{k=1..K} (1 - p^(-1-2k))`` and its tail bound."""
    if p < 2 or K < 1:
        raise DomainError("need p >= 2 and K >= 1")
    return _product(p, -1, K)


def _inv_falling(p: int, m: int) -> float:
    # 1 / prod_{i=1..m} (p^i - 1), computed without overflow
    out = 1.0
    for i in range(1, m + 1):
        out *= float(p) ** -i / (1 - float(p) ** -i)
    return out


def nu_inf_sym(p: int, k: int, K: int = 40) -> float:
    """Limiting probability that a random symmetric matrix has corank k mod p."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return product_sym(p, K)[0] * _inv_falling(p, k)


def nu_inf_alt_even(p: int, k: int, K: int = 40) -> float:
    """Limiting probability of corank 2k for even-size alternating matrices."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return product_sym(p, K)[0] * float(p) ** (2 * k) * _inv_falling(p, 2 * k)


def nu_inf_alt_odd(p: int, k: int, K: int = 40) -> float:
    """Limiting probability of corank 2k+1 for odd-size alternating matrices."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return product_sym(p, K)[0] * float(p) ** (2 * k + 1) * _inv_falling(p, 2 * k + 1)


def _key_parts(key: PairedClassKey | CompositeKey) -> tuple[PairedClassKey, ...]:
    return key.parts if isinstance(key, CompositeKey) else (key,)


def mu_inf_sym(
    key: PairedClassKey | CompositeKey | None = None,
    primes: Sequence[int] | None = None,
    *,
    aut_order: int | None = None,
    group_order: int | None = None,
    K: int = 40,
) -> float:
    """Limiting mass of a paired class over the primes P.

    Pass either a determinate key (each prime part is resolved to ``|G_p|``
    and ``|Aut|``) or the totals ``aut_order`` and ``group_order`` directly.
    Primes of P absent from the key contribute their trivial-class factor.
    """
    if key is not None:
        parts = {k.p: k for k in _key_parts(key)}
        primes = tuple(primes) if primes is not None else tuple(sorted(parts))
        val = 1.0
        for p in primes:
            val *= product_sym(p, K)[0]
            if p in parts:
                val /= parts[p].p ** sum(parts[p].lam) * aut_of_key(parts[p])
        return val
    if primes is None or aut_order is None or group_order is None:
        raise DomainError("need a key, or primes with aut_order and group_order")
    val = 1.0
    for p in primes:
        val *= product_sym(p, K)[0]
    return val / (group_order * aut_order)


def _h_by_prime(h: GroupType | Sequence[int] | Mapping[int, GroupType | Sequence[int]], primes: Sequence[int]) -> dict[int, tuple[int, ...]]:
    if isinstance(h, Mapping):
        return {p: tuple(GroupType(tuple(getattr(v, "lam", v))).lam) for p, v in h.items()}
    lam = h.lam if isinstance(h, GroupType) else GroupType(tuple(h)).lam
    if len(primes) != 1 and lam:
        raise DomainError("pass H per prime when P has several primes")
    return {primes[0]: lam} if lam else {}


def mu_inf_alt_even(h, primes: Sequence[int], K: int = 40) -> float:
    """``|G| / |Sp(G)| * prod_p prod_k (1 - p^(1-2k))`` with G = H + H."""
    hp = _h_by_prime(h, primes)
    val = 1.0
    for p in primes:
        lam = hp.get(p, ())
        val *= product_sym(p, K)[0] * p ** (2 * sum(lam)) / sp_count(lam, p)
    return val


def mu_inf_alt_odd(h, primes: Sequence[int], K: int = 40) -> float:
    """``1 / |Sp(G)| * prod_p prod_k (1 - p^(-1-2k))`` with G = H + H."""
    hp = _h_by_prime(h, primes)
    val = 1.0
    for p in primes:
        lam = hp.get(p, ())
        val *= product_alt_odd(p, K)[0] / sp_count(lam, p)
    return val


def modulus_for(g: GroupType | Mapping[int, GroupType], primes: Sequence[int], setting: str) -> Modulus:
    """Smallest modulus at which classes of depth up to ``Dep(G_p)`` resolve.

    Exponents are ``Dep + 3`` at p = 2 for symmetric matrices and ``Dep + 1``
    otherwise. For the alternating setting pass H, since Dep(H + H) = Dep(H).
    """
    if setting not in ("symmetric", "alternating"):
        raise DomainError(f"unknown setting {setting!r}")
    by_p = dict(g) if isinstance(g, Mapping) else {primes[0]: g} if len(primes) == 1 else None
    if by_p is None:
        raise DomainError("pass the group per prime when P has several primes")
    exps = {}
    for p in primes:
        dep = by_p[p].dep if p in by_p else 0
        exps[p] = dep + (3 if p == 2 and setting == "symmetric" else 1)
    return modulus_from_primes(exps)


# --------------------------------------------------------- enumerated references


def nil_space(k: int, p: int, e: int, kind: str = "symmetric", budget: int = 10**7) -> np.ndarray:
    """All k x k symmetric (or alternating) matrices with entries in pZ/p^e."""
    q = p**e
    pairs = [(i, j) for i in range(k) for j in range(i if kind == "symmetric" else i + 1, k)]
    count = (p ** (e - 1)) ** len(pairs)
    if count > budget:
        raise BudgetExceeded(f"{count} nil matrices exceed the budget {budget}")
    vals = np.arange(0, q, p, dtype=np.int64)
    out = np.zeros((count, k, k), dtype=np.int64)
    if not pairs:
        return out
    grid = np.array(list(itertools.product(vals, repeat=len(pairs))), dtype=np.int64).reshape(count, len(pairs))
    for c, (i, j) in enumerate(pairs):
        out[:, i, j] = grid[:, c]
        out[:, j, i] = grid[:, c] if kind == "symmetric" else (-grid[:, c]) % q
    return out


def keys_of_batch(batch: np.ndarray, p: int, e: int, kind: str = "symmetric") -> list[str]:
    """Class-key strings of a stack of matrices mod p^e."""
    if len(batch) == 0:
        return []
    n = batch.shape[1]
    if kind == "symmetric":
        piv, cnt, zer = _kernels.sym_reduce_batch(np.ascontiguousarray(batch), p, e)
        cache: dict[bytes, str] = {}
        out = []
        for b in range(len(batch)):
            c = int(cnt[b])
            sig = piv[b, :c].tobytes() + bytes([int(zer[b])])
            if sig not in cache:
                cache[sig] = str(sym_key_from_pivots(piv[b], c, int(zer[b]), p, e))
            out.append(cache[sig])
        return out
    vals, cnt, zer = _kernels.alt_reduce_batch(np.ascontiguousarray(batch), p, e)
    return [str(alt_key_from_reduction(vals[b], int(cnt[b]), int(zer[b]), n, p, e)) for b in range(len(batch))]


def conditional_nil_law(k: int, p: int, e: int, kind: str = "symmetric", budget: int = 10**7) -> dict[str, Fraction]:
    """Exact law of the class of a uniform k x k nil matrix mod p^e."""
    return dict(_nil_law(k, p, e, kind, budget))


@lru_cache(maxsize=256)
def _nil_law(k: int, p: int, e: int, kind: str, budget: int) -> tuple[tuple[str, Fraction], ...]:
    keys = keys_of_batch(nil_space(k, p, e, kind, budget), p, e, kind)
    cnt = Counter(keys)
    total = sum(cnt.values())
    return tuple((key, Fraction(v, total)) for key, v in sorted(cnt.items()))


OTHER = "other"


def reference_table(kind: str, p: int, e: int, k_max: int, parity: int = 0, K: int = 40, budget: int = 10**7) -> DistributionTable:
    """Limiting class law at modulus p^e, exact up to corank ``k_max``.

    ``kind`` is ``"symmetric"`` or ``"alternating"``; for the latter,
    ``parity`` selects even (0) or odd (1) matrix size and ``k`` counts pairs
    of corank. Mass beyond ``k_max`` is lumped under the key ``"other"``.
    """
    probs: dict[str, float] = {}
    for k in range(k_max + 1):
        if kind == "symmetric":
            weight, size = nu_inf_sym(p, k, K), k
        elif parity == 0:
            weight, size = nu_inf_alt_even(p, k, K), 2 * k
        else:
            weight, size = nu_inf_alt_odd(p, k, K), 2 * k + 1
        for key, w in conditional_nil_law(size, p, e, kind, budget).items():
            probs[key] = probs.get(key, 0.0) + weight * float(w)
    rest = 1.0 - sum(probs.values())
    probs[OTHER] = max(rest, 0.0)
    return DistributionTable(dict(sorted(probs.items())))
