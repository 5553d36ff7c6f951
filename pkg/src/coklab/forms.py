"""Congruence normal forms over Z/p^e.

Symmetric matrices at odd p reduce to a diagonal form with a canonical unit
labelling. At p = 2 the reduction yields a block decomposition that is a
witness only; classification goes through :mod:`coklab.cokernel`.
Alternating matrices reduce to symplectic 2x2 blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby

import numpy as np

from . import _kernels
from .errors import DomainError, InsufficientPrecision, StructureError
from .matrices import ALTERNATING, SYMMETRIC, ModMatrix, block_diag, rank_mod_p
from .ring import factorize, legendre, smallest_nonsquare, val_p

UNIT = "unit"
HYPERBOLIC = "U"
V_BLOCK = "V"
_SHAPE_ORDER = {UNIT: 0, HYPERBOLIC: 1, V_BLOCK: 2}


@dataclass(frozen=True)
class SymOddCanonical:
    """Diagonal label ``diag(eps_i p^lam_i)`` with ``lam`` nondecreasing.

    Within each run of equal exponents every ``eps`` is 1 except possibly the
    last, which is ``r_p`` when the run's unit product is a nonsquare. Entries
    with ``lam == e`` are zero mod p^e and carry ``eps = 1``.
    """

    p: int
    e: int
    lam: tuple[int, ...]
    eps: tuple[int, ...]

    @property
    def capped(self) -> bool:
        return any(v == self.e for v in self.lam)

    def matrix(self) -> ModMatrix:
        q = self.p**self.e
        diag = [eps * self.p**v % q for v, eps in zip(self.lam, self.eps)]
        return ModMatrix(np.diag(np.array(diag, dtype=np.int64)).reshape(len(diag), len(diag)), q, SYMMETRIC)


@dataclass(frozen=True, order=True)
class TwoAdicBlock:
    """One block of a 2-adic decomposition.

    ``shape`` is ``"unit"`` for ``(2^d u)`` with ``u`` in {1, 3, 5, 7}, ``"U"``
    for ``[[0, 2^d], [2^d, 0]]`` and ``"V"`` for
    ``[[2^(d+1), 2^d], [2^d, 2^(d+1)]]``.
    """

    d: int
    shape: str
    u: int = 0

    def sort_key(self) -> tuple[int, int, int]:
        return (self.d, _SHAPE_ORDER[self.shape], self.u)

    @property
    def size(self) -> int:
        return 1 if self.shape == UNIT else 2

    def matrix(self) -> np.ndarray:
        s = 2**self.d
        if self.shape == UNIT:
            return np.array([[self.u * s]], dtype=np.int64)
        if self.shape == HYPERBOLIC:
            return np.array([[0, s], [s, 0]], dtype=np.int64)
        return np.array([[2 * s, s], [s, 2 * s]], dtype=np.int64)

    def __str__(self) -> str:
        return f"({self.u * 2**self.d})" if self.shape == UNIT else f"{self.shape}{self.d}"


@dataclass(frozen=True)
class AltCanonical:
    """Symplectic label: blocks ``[[0, p^l], [-p^l, 0]]`` plus a zero tail."""

    p: int
    e: int
    n: int
    lam: tuple[int, ...]
    residual_corank: int

    @property
    def capped(self) -> bool:
        return self.residual_corank > self.n % 2

    def matrix(self) -> ModMatrix:
        q = self.p**self.e
        blocks = [np.array([[0, self.p**v], [-(self.p**v), 0]]) for v in self.lam]
        blocks.append(np.zeros((self.residual_corank, self.residual_corank), dtype=np.int64))
        return ModMatrix(block_diag(*blocks) % q, q, ALTERNATING)


def _require(m: ModMatrix, kind: str) -> tuple[int, int]:
    if m.kind != kind:
        raise StructureError(f"expected a {kind} matrix, got {m.kind}")
    return m.prime_power


def sym_pivots(m: ModMatrix, track: bool = False):
    """Raw congruence reduction of a symmetric matrix (see ``_kernels``)."""
    p, e = _require(m, SYMMETRIC)
    return _kernels.sym_reduce(np.ascontiguousarray(m.entries), p, e, track)


def canonical_from_pivots(pivots: np.ndarray, count: int, zeros: int, p: int, e: int) -> SymOddCanonical:
    """Build the odd-p label from ``sym_reduce`` output."""
    r = smallest_nonsquare(p)
    pairs = sorted((int(v), legendre(int(u), p)) for _, v, u, _, _ in pivots[:count])
    lam: list[int] = []
    eps: list[int] = []
    for v, grp in groupby(pairs, key=lambda t: t[0]):
        signs = [s for _, s in grp]
        prod = int(np.prod(signs))
        lam += [v] * len(signs)
        eps += [1] * (len(signs) - 1) + [1 if prod == 1 else r]
    lam += [e] * zeros
    eps += [1] * zeros
    return SymOddCanonical(p, e, tuple(lam), tuple(eps))


def canonical_sym_odd(m: ModMatrix) -> SymOddCanonical:
    """Congruence-invariant diagonal label of a symmetric matrix, p odd.

    >>> canonical_sym_odd(ModMatrix([[2, 0], [0, 1]], 9)).eps
    (1, 2)
    """
    p, e = _require(m, SYMMETRIC)
    if p == 2:
        raise DomainError("canonical_sym_odd needs an odd prime")
    pivots, count, zeros, _ = sym_pivots(m)
    return canonical_from_pivots(pivots, count, zeros, p, e)


def _raw_to_block(code: int, v: int, x: int, y: int, z: int, e: int) -> TwoAdicBlock:
    if e - v < 3:
        raise InsufficientPrecision(f"block of scale {v} needs e >= {v + 3}, have e = {e}")
    if code == 0:
        return TwoAdicBlock(v, UNIT, x % 8)
    det = (x * z - y * y) % 8
    if det == 7:
        return TwoAdicBlock(v, HYPERBOLIC)
    if det == 3:
        return TwoAdicBlock(v, V_BLOCK)
    raise StructureError(f"unexpected 2x2 block determinant class {det}")


def decompose_sym_2(m: ModMatrix) -> list[TwoAdicBlock]:
    """A block decomposition of a symmetric matrix mod 2^e.

    The result is a congruence witness, not an invariant: congruent inputs
    may yield different block lists. The accumulated transform is checked
    against the raw reduction before the blocks are typed.
    """
    p, e = _require(m, SYMMETRIC)
    if p != 2:
        raise DomainError("decompose_sym_2 needs modulus 2^e")
    pivots, count, zeros, u = sym_pivots(m, track=True)
    q = 2**e
    raw = []
    for code, v, x, y, z in pivots[:count]:
        s = 2**int(v)
        raw.append([[x * s]] if code == 0 else [[x * s, y * s], [y * s, z * s]])
    raw.append(np.zeros((zeros, zeros), dtype=np.int64))
    lhs = (u.astype(object) @ m.entries.astype(object) @ u.T.astype(object)) % q
    if not np.array_equal(lhs.astype(np.int64), block_diag(*raw) % q):
        raise AssertionError("tracked transform does not reproduce the block form")
    if zeros:
        raise InsufficientPrecision(f"{zeros} dimension(s) vanish mod 2^{e}")
    return [_raw_to_block(int(c), int(v), int(x), int(y), int(z), e) for c, v, x, y, z in pivots[:count]]


def assemble_blocks(blocks: list[TwoAdicBlock], e: int) -> ModMatrix:
    """Block-diagonal matrix mod 2^e from a block list."""
    q = 2**e
    return ModMatrix(block_diag(*[b.matrix() for b in blocks]) % q, q, SYMMETRIC)


def ti_class(b: TwoAdicBlock) -> TwoAdicBlock:
    """Merge blocks that induce the same pairing into one representative.

    The four merged families are the units of scale 1, the two 2x2 shapes of
    scale 1, the scale-2 units 1 and 5, and the scale-2 units 3 and 7. Each
    family is represented by its least block.
    """
    if b.d == 1 and b.shape == UNIT:
        return TwoAdicBlock(1, UNIT, 1)
    if b.d == 1:
        return TwoAdicBlock(1, HYPERBOLIC)
    if b.d == 2 and b.shape == UNIT:
        return TwoAdicBlock(2, UNIT, 1 if b.u in (1, 5) else 3)
    return b


def canonical_alt(m: ModMatrix) -> AltCanonical:
    """Symplectic label of an alternating matrix mod p^e."""
    p, e = _require(m, ALTERNATING)
    vals, count, zeros, _ = _kernels.alt_reduce(np.ascontiguousarray(m.entries), p, e, False)
    lam = tuple(sorted((int(v) for v in vals[:count]), reverse=True))
    return AltCanonical(p, e, m.n, lam, int(zeros))


def same_pairing_scalar(alpha: int, alpha2: int, p: int, e: int) -> bool:
    """Whether ``(alpha)`` and ``(alpha2)`` mod p^e give the same 1x1 pairing."""
    if p == 2:
        raise DomainError("same_pairing_scalar is for odd p")
    v1, v2 = val_p(alpha, p, e), val_p(alpha2, p, e)
    if v1 != v2:
        return False
    if v1 == 0 or v1 >= e:
        raise DomainError(f"valuation {v1} outside 1..{e - 1}")
    u1, u2 = (alpha % p**e) // p**v1, (alpha2 % p**e) // p**v1
    return legendre(u1 * u2, p) == 1


def pad_invertible(m: ModMatrix, block: ModMatrix) -> ModMatrix:
    """``diag(block, M)``, which keeps the quasi-pairing class of ``M``."""
    if block.modulus != m.modulus or block.kind != m.kind:
        raise DomainError("block and matrix must share modulus and kind")
    for f in factorize(m.modulus).factors:
        if rank_mod_p(block.entries, f.p) != block.n:
            raise DomainError("padding block is not invertible")
    return ModMatrix(block_diag(block.entries, m.entries), m.modulus, m.kind)
