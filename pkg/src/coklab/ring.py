"""Arithmetic over Z/p^e and composite Z/a.

Residues are plain Python ints holding the least nonnegative representative;
the modulus travels alongside them rather than inside a wrapper object.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import DomainError, InsufficientPrecision, NonUnit

SQUARE = "square"
NONSQUARE = "nonsquare"


def is_prime(n: int) -> bool:
    """Deterministic trial division; moduli here stay below 2**31."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_up_to(bound: int) -> list[int]:
    return [q for q in range(2, bound + 1) if is_prime(q)]


@dataclass(frozen=True, order=True)
class PrimePower:
    p: int
    e: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.e < 1:
            raise DomainError(f"exponent must be >= 1, got {self.e}")

    @property
    def q(self) -> int:
        """The modulus p**e."""
        return self.p**self.e

    def __str__(self) -> str:
        return f"{self.p}^{self.e}"


@dataclass(frozen=True)
class Modulus:
    a: int
    factors: tuple[PrimePower, ...]

    def __post_init__(self) -> None:
        prod = 1
        for f in self.factors:
            prod *= f.q
        if prod != self.a:
            raise DomainError(f"factors {self.factors} do not multiply to {self.a}")
        ps = [f.p for f in self.factors]
        if ps != sorted(set(ps)):
            raise DomainError("primes must be distinct and increasing")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(f.p for f in self.factors)

    def exponent(self, p: int) -> int:
        for f in self.factors:
            if f.p == p:
                return f.e
        return 0

    def __str__(self) -> str:
        return "*".join(str(f) for f in self.factors)


@lru_cache(maxsize=4096)
def factorize(a: int) -> Modulus:
    """Factor ``a >= 2`` into prime powers.

    >>> factorize(12)
    Modulus(a=12, factors=(PrimePower(p=2, e=2), PrimePower(p=3, e=1)))
    """
    if not isinstance(a, int) or a < 2:
        raise DomainError(f"modulus must be an integer >= 2, got {a!r}")
    rest, f, out = a, 2, []
    while f * f <= rest:
        if rest % f == 0:
            e = 0
            while rest % f == 0:
                rest //= f
                e += 1
            out.append(PrimePower(f, e))
        f += 1 if f == 2 else 2
    if rest > 1:
        out.append(PrimePower(rest, 1))
    return Modulus(a, tuple(out))


def modulus_from_primes(exponents: dict[int, int]) -> Modulus:
    """Build the modulus prod p**e from a ``{p: e}`` mapping."""
    factors = tuple(PrimePower(p, e) for p, e in sorted(exponents.items()))
    a = 1
    for f in factors:
        a *= f.q
    return Modulus(a, factors)


def val_p(x: int, p: int, e: int) -> int:
    """Valuation of ``x`` in Z/p^e, with ``e`` standing for zero."""
    x %= p**e
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def inverse_unit(x: int, m: int) -> int:
    """Inverse of the unit ``x`` modulo ``m``."""
    try:
        return pow(x % m, -1, m)
    except ValueError:
        raise NonUnit(f"{x} is not a unit mod {m}") from None


@lru_cache(maxsize=64)
def smallest_nonsquare(p: int) -> int:
    """The fixed nonsquare unit r_p used in canonical labels (p odd)."""
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise DomainError(f"no nonsquare mod {p}")


def legendre(u: int, p: int) -> int:
    """+1 for a nonzero square mod p, -1 for a nonsquare, 0 for 0."""
    u %= p
    if u == 0:
        return 0
    return 1 if pow(u, (p - 1) // 2, p) == 1 else -1


def square_class(u: int, p: int, e: int) -> str | int:
    """Class of the unit ``u`` modulo squares of units of Z/p^e.

    Odd p gives ``"square"``/``"nonsquare"``; p = 2 gives ``u mod 8``.
    """
    if u % p == 0:
        raise NonUnit(f"{u} is not a unit mod {p}^{e}")
    if p == 2:
        if e < 3:
            raise InsufficientPrecision("square classes mod 2^e need e >= 3")
        return u % 8
    return SQUARE if legendre(u, p) == 1 else NONSQUARE


def crt_split(x: int, modulus: Modulus) -> list[int]:
    return [x % f.q for f in modulus.factors]


def crt_combine(residues: Sequence[int], modulus: Modulus) -> int:
    if len(residues) != len(modulus.factors):
        raise DomainError("one residue per prime power is required")
    x = 0
    for r, f in zip(residues, modulus.factors):
        rest = modulus.a // f.q
        x += r * rest * pow(rest, -1, f.q)
    return x % modulus.a
