"""Dense square matrices over Z/a with symmetric or alternating structure.

Indices are 0-based throughout. Entries are stored as ``int64`` least
nonnegative representatives; products are promoted to Python integers when
the modulus is large enough that ``int64`` accumulation could overflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, PivotError, StructureError
from .ring import factorize, inverse_unit

SYMMETRIC = "symmetric"
ALTERNATING = "alternating"
GENERAL = "general"
KINDS = (SYMMETRIC, ALTERNATING, GENERAL)

IndexSet = tuple[int, ...]


def _int64_safe(m: int | None, inner: int = 1) -> bool:
    if m is None:
        return False
    return (m - 1) ** 2 * max(inner, 1) < 2**62


def matmul_mod(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """``a @ b mod m`` without silent overflow."""
    if _int64_safe(m, a.shape[1] if a.ndim == 2 else 1):
        return (a.astype(np.int64) @ b.astype(np.int64)) % m
    out = (a.astype(object) @ b.astype(object)) % m
    return out.astype(np.int64) if m < 2**63 else out


def check_kind(a: np.ndarray, kind: str, m: int | None) -> None:
    """Raise :class:`StructureError` when ``a`` violates ``kind``."""
    if kind not in KINDS:
        raise StructureError(f"unknown kind {kind!r}")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructureError(f"matrix must be square, got shape {a.shape}")
    if kind == GENERAL:
        return
    t = a.T
    if kind == SYMMETRIC:
        ok = np.array_equal(a, t) if m is None else np.all((a - t) % m == 0)
        if not ok:
            raise StructureError("matrix is not symmetric")
    else:
        if m is None:
            ok = np.array_equal(a, -t) and not np.any(np.diag(a))
        else:
            ok = np.all((a + t) % m == 0) and np.all(np.diag(a) % m == 0)
        if not ok:
            raise StructureError("matrix is not alternating")


@dataclass(frozen=True, eq=False)
class ModMatrix:
    """Square matrix over Z/modulus, or over Z when ``modulus`` is None."""

    entries: np.ndarray
    modulus: int | None
    kind: str = SYMMETRIC

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=np.int64, copy=True)
        if a.size == 0:
            a = a.reshape(0, 0)
        if self.modulus is not None:
            if self.modulus < 2:
                raise DomainError(f"modulus must be >= 2, got {self.modulus}")
            a %= self.modulus
        check_kind(a, self.kind, self.modulus)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def prime_power(self) -> tuple[int, int]:
        """``(p, e)`` for a prime-power modulus; raises otherwise."""
        if self.modulus is None:
            raise DomainError("integer matrix has no prime-power modulus")
        mod = factorize(self.modulus)
        if len(mod.factors) != 1:
            raise DomainError(f"modulus {self.modulus} is not a prime power")
        f = mod.factors[0]
        return f.p, f.e

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> np.ndarray:
        cols = rows if cols is None else cols
        return self.entries[np.ix_(list(rows), list(cols))]

    def principal(self, idx: Sequence[int]) -> "ModMatrix":
        return ModMatrix(self.submatrix(idx), self.modulus, self.kind)

    def reduce(self, m: int) -> "ModMatrix":
        """Reduce further to Z/m (m must divide the current modulus)."""
        if self.modulus is not None and self.modulus % m:
            raise DomainError(f"{m} does not divide {self.modulus}")
        return ModMatrix(self.entries, m, self.kind)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.kind == other.kind
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.kind, self.entries.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"ModMatrix(n={self.n}, modulus={self.modulus}, kind={self.kind!r}, entries={self.entries.tolist()})"

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "modulus": self.modulus,
                "kind": self.kind,
                "entries": [int(v) for v in self.entries.ravel()],
            }
        )

    @classmethod
    def from_json(cls, text: str | dict) -> "ModMatrix":
        data = json.loads(text) if isinstance(text, str) else text
        try:
            n = int(data["n"])
            flat = [int(v) for v in data["entries"]]
            kind = data.get("kind", SYMMETRIC)
            modulus = data.get("modulus")
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed matrix JSON: {exc}") from None
        if len(flat) != n * n:
            raise DomainError(f"expected {n * n} entries, got {len(flat)}")
        return cls(np.array(flat, dtype=np.int64).reshape(n, n), modulus, kind)


@dataclass(frozen=True, eq=False)
class CongruenceTransform:
    """An invertible matrix U acting by M -> U M U^T."""

    U: np.ndarray
    modulus: int

    def __post_init__(self) -> None:
        u = np.array(self.U, dtype=np.int64, copy=True) % self.modulus
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DomainError("transform must be square")
        for f in factorize(self.modulus).factors:
            if rank_mod_p(u, f.p) != u.shape[0]:
                raise DomainError("transform determinant is not a unit")
        u.setflags(write=False)
        object.__setattr__(self, "U", u)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def compose(self, other: "CongruenceTransform") -> "CongruenceTransform":
        """The transform ``self.U @ other.U`` (apply ``other`` first)."""
        return CongruenceTransform(matmul_mod(self.U, other.U, self.modulus), self.modulus)


def reduce_mod(m: np.ndarray | Sequence[Sequence[int]], a: int, kind: str = SYMMETRIC) -> ModMatrix:
    """Reduce an integer matrix entrywise mod ``a``.

    The kind is checked on the integer matrix itself, so an asymmetric input
    declared symmetric is rejected even if it happens to be symmetric mod a.
    """
    arr = np.asarray(m, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 0)
    check_kind(arr, kind, None)
    return ModMatrix(arr, a, kind)


def rank_mod_p(a: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    x = np.array(a, dtype=np.int64) % p
    rows, cols = x.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(x[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            x[[r, piv]] = x[[piv, r]]
        x[r] = x[r] * pow(int(x[r, c]), -1, p) % p
        col = x[:, c].copy()
        col[r] = 0
        x = (x - np.outer(col, x[r])) % p
        r += 1
    return r


def _inv_prime_power(a: np.ndarray, p: int, q: int) -> np.ndarray:
    n = a.shape[0]
    safe = _int64_safe(q, 2)
    dtype = np.int64 if safe else object
    x = np.concatenate([a.astype(dtype) % q, np.eye(n, dtype=dtype)], axis=1)
    for c in range(n):
        piv = next((r for r in range(c, n) if int(x[r, c]) % p), None)
        if piv is None:
            raise PivotError("pivot block is not invertible mod p")
        if piv != c:
            x[[c, piv]] = x[[piv, c]]
        x[c] = x[c] * inverse_unit(int(x[c, c]), q) % q
        col = x[:, c].copy()
        col[c] = 0
        x = (x - np.outer(col, x[c])) % q
    out = x[:, n:]
    return out.astype(np.int64) if q < 2**63 else out


def inv_mod(a: np.ndarray, m: int) -> np.ndarray:
    """Inverse of a square matrix with unit determinant mod ``m``."""
    a = np.asarray(a)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    mod = factorize(m)
    if len(mod.factors) == 1:
        f = mod.factors[0]
        return _inv_prime_power(a, f.p, f.q)
    out = np.zeros((n, n), dtype=object)
    for f in mod.factors:
        part = _inv_prime_power(a, f.p, f.q).astype(object)
        rest = m // f.q
        out = out + part * (rest * pow(rest, -1, f.q))
    out %= m
    return out.astype(np.int64) if m < 2**63 else out


def _eliminate(s: np.ndarray, piv: list[int], p: int) -> np.ndarray:
    """Schur update of ``s`` over F_p on the pivot rows/columns ``piv``."""
    blk = s[np.ix_(piv, piv)]
    binv = _inv_prime_power(blk, p, p)
    cols = s[:, piv]
    rows = s[piv, :]
    s = (s - (cols @ binv % p) @ rows) % p
    s[piv, :] = 0
    s[:, piv] = 0
    return s


def find_invertible_principal_minor(m: ModMatrix, p: int | None = None) -> IndexSet:
    """Greedy maximal pivot set ``Ic`` with ``M[Ic, Ic]`` invertible mod p.

    Symmetric input pivots on the smallest-index diagonal unit of the running
    Schur complement; if none exists it takes the lexicographically least
    off-diagonal unit ``(i, j)`` as a joint 2x2 pivot. Alternating input only
    uses such 2x2 pivots.
    """
    if m.kind not in (SYMMETRIC, ALTERNATING):
        raise StructureError("pivot search needs a symmetric or alternating matrix")
    if p is None:
        p = m.prime_power[0]
    s = m.entries % p
    chosen: list[int] = []
    n = m.n
    while True:
        if m.kind == SYMMETRIC:
            d = np.nonzero(np.diag(s))[0]
            if d.size:
                i = int(d[0])
                s = _eliminate(s, [i], p)
                chosen.append(i)
                continue
        nz = np.argwhere(np.triu(s, 1))
        if nz.size == 0:
            break
        i, j = (int(v) for v in nz[0])
        s = _eliminate(s, [i, j], p)
        chosen += [i, j]
    assert len(chosen) <= n
    return tuple(sorted(chosen))


def schur_complement(m: ModMatrix, pivot: Iterable[int]) -> ModMatrix:
    """The nil part ``D - C^T B^{-1} C`` on the complement of ``pivot``."""
    if m.modulus is None:
        raise DomainError("schur_complement needs a modulus")
    ic = sorted(set(pivot))
    i = [k for k in range(m.n) if k not in set(ic)]
    q = m.modulus
    if not ic:
        return m.principal(i)
    b = m.submatrix(ic)
    c = m.submatrix(ic, i)
    d = m.submatrix(i)
    binv = inv_mod(b, q)
    ct = m.submatrix(i, ic)
    s = (d - matmul_mod(matmul_mod(ct, binv, q), c, q)) % q
    return ModMatrix(s, q, m.kind)


def congruence_apply(u: CongruenceTransform | np.ndarray, m: ModMatrix) -> ModMatrix:
    """``U M U^T``."""
    umat = u.U if isinstance(u, CongruenceTransform) else np.asarray(u, dtype=np.int64)
    if m.modulus is None:
        raise DomainError("congruence_apply needs a modulus")
    if umat.shape != (m.n, m.n):
        raise DomainError(f"transform of shape {umat.shape} does not match n={m.n}")
    if isinstance(u, CongruenceTransform) and u.modulus != m.modulus:
        raise DomainError("transform and matrix moduli differ")
    q = m.modulus
    out = matmul_mod(matmul_mod(umat % q, m.entries, q), umat.T % q, q)
    if m.kind == ALTERNATING:
        np.fill_diagonal(out, 0)
    return ModMatrix(out, q, m.kind)


def border(m: ModMatrix, xi: Sequence[int], z: int = 0) -> ModMatrix:
    """Append one row and column: ``[[M, xi], [xi^T or -xi^T, z]]``."""
    xi = np.asarray(xi, dtype=np.int64).reshape(-1)
    n = m.n
    if xi.shape[0] != n:
        raise DomainError(f"border vector has length {xi.shape[0]}, expected {n}")
    out = np.zeros((n + 1, n + 1), dtype=np.int64)
    out[:n, :n] = m.entries
    out[:n, n] = xi
    if m.kind == ALTERNATING:
        out[n, :n] = -xi
    else:
        out[n, :n] = xi
        out[n, n] = z
    return ModMatrix(out, m.modulus, m.kind)


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    blocks = tuple(np.atleast_2d(np.asarray(b, dtype=np.int64)) if np.size(b) else np.zeros((0, 0), np.int64) for b in blocks)
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    k = 0
    for b in blocks:
        s = b.shape[0]
        out[k : k + s, k : k + s] = b
        k += s
    return out


def random_invertible(n: int, modulus: int, seed: int | np.random.Generator | None = None) -> CongruenceTransform:
    """A random element of GL_n(Z/modulus), by rejection sampling."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    primes = factorize(modulus).primes
    while True:
        u = rng.integers(0, modulus, size=(n, n), dtype=np.int64)
        if all(rank_mod_p(u, p) == n for p in primes):
            return CongruenceTransform(u, modulus)
