"""Cokernel group types, pairings, quasi-pairing keys and automorphism counts.

A class key names the p-part of a cokernel together with its pairing:

* odd p: the exponents of the nil part plus one square-class bit per run of
  equal exponents;
* p = 2: the exponents plus the least Gram matrix over all bases of the
  paired group (brute force, capped at ``GROUP_CAP`` elements);
* alternating: the type of H where the torsion is H + H, which determines the
  alternating pairing.

Keys whose exponents reach the modulus cap are reported as undetermined.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, DomainError, Indeterminate, PrecisionExceeded, Singular, StructureError
from .forms import canonical_from_pivots
from .matrices import ALTERNATING, GENERAL, SYMMETRIC, ModMatrix, rank_mod_p
from .ring import factorize, smallest_nonsquare

GROUP_CAP = 4096
NODE_BUDGET = 2_000_000
# the splitting search counts vectorized element operations, not nodes
SPLIT_BUDGET = 2_000_000_000
E_MAX = 24

SYM_PAIRED = "symmetric-paired"
ALT_GROUP = "alternating-group"
UNDETERMINED = "quasi-undetermined"
_TAGS = {SYM_PAIRED: "S", ALT_GROUP: "A", UNDETERMINED: "U"}


@dataclass(frozen=True)
class GroupType:
    """Partition ``lam`` of a finite abelian p-group, parts nonincreasing."""

    lam: tuple[int, ...] = ()
    capped: bool = False

    def __post_init__(self) -> None:
        lam = tuple(sorted((int(v) for v in self.lam if v > 0), reverse=True))
        object.__setattr__(self, "lam", lam)

    @property
    def dep(self) -> int:
        return self.lam[0] if self.lam else 0

    @property
    def length(self) -> int:
        return len(self.lam)

    def order(self, p: int) -> int:
        return p ** sum(self.lam)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.lam)) + ")" + ("+" if self.capped else "")


@dataclass(frozen=True, eq=False)
class PairingGram:
    """Pairing on ``G = sum Z/p^lam_i`` with ``<g_i, g_j> = c_ij / p^min(lam_i, lam_j)``.

    ``skew`` marks an alternating pairing; otherwise ``c`` must be symmetric.
    """

    p: int
    lam: tuple[int, ...]
    c: tuple[tuple[int, ...], ...]
    skew: bool = False

    def __post_init__(self) -> None:
        lam = tuple(int(v) for v in self.lam)
        m = len(lam)
        c = tuple(tuple(int(self.c[i][j]) % self.p ** min(lam[i], lam[j]) for j in range(m)) for i in range(m))
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "c", c)
        if list(lam) != sorted(lam, reverse=True) or any(v < 1 for v in lam):
            raise DomainError(f"exponents must be positive and nonincreasing, got {lam}")
        mods = [[self.p ** min(lam[i], lam[j]) for j in range(m)] for i in range(m)]
        for i in range(m):
            for j in range(m):
                want = (-c[j][i] if self.skew else c[j][i]) % mods[i][j]
                if c[i][j] != want:
                    raise StructureError("Gram matrix lacks the required symmetry")
        if not self.is_perfect():
            raise StructureError("pairing is not perfect")

    @property
    def m(self) -> int:
        return len(self.lam)

    @property
    def group(self) -> GroupType:
        return GroupType(self.lam)

    def order_of(self, i: int, j: int) -> int:
        mn = min(self.lam[i], self.lam[j])
        c = self.c[i][j]
        if c == 0:
            return 1
        v = 0
        while c % self.p == 0:
            c //= self.p
            v += 1
        return self.p ** (mn - v)

    def is_perfect(self) -> bool:
        """Row ``i`` reaches order ``p^lam_i`` and ``x -> <x, .>`` is injective."""
        m = self.m
        if m == 0:
            return True
        for i in range(m):
            if max(self.order_of(i, j) for j in range(m)) != self.p ** self.lam[i]:
                return False
        return _perfect(self.p, self.lam, self.c)

    def scaled(self) -> np.ndarray:
        """Integer matrix S with ``<x, y> = x^T S y / p^lam_1 mod 1``."""
        top = self.lam[0] if self.lam else 0
        s = np.zeros((self.m, self.m), dtype=np.int64)
        for i in range(self.m):
            for j in range(self.m):
                s[i, j] = self.c[i][j] * self.p ** (top - min(self.lam[i], self.lam[j]))
        return s


def _perfect(p: int, lam: tuple[int, ...], c) -> bool:
    # the pairing is perfect iff x -> <x, .> is injective; check on G[p]
    top = lam[0]
    s = np.array(
        [[c[i][j] * p ** (top - min(lam[i], lam[j])) for j in range(len(lam))] for i in range(len(lam))],
        dtype=object,
    )
    # G[p] is spanned by p^(lam_i - 1) g_i; its pairings with g_j live in p^(-1)Z/Z
    rows = []
    for i in range(len(lam)):
        rows.append([int(s[i, j] * p ** (lam[i] - 1)) // p ** (top - 1) % p for j in range(len(lam))])
    return rank_mod_p(np.array(rows, dtype=np.int64), p) == len(lam)


@dataclass(frozen=True)
class PairedClassKey:
    """Hashable class identifier for the p-part of a (quasi-)paired cokernel."""

    p: int
    kind: str
    lam: tuple[int, ...]
    payload: bytes = b""

    @property
    def determinate(self) -> bool:
        return self.kind != UNDETERMINED

    def __str__(self) -> str:
        return f"{self.p}:({','.join(map(str, self.lam))}):{_TAGS[self.kind]}{self.payload.hex()}"


@dataclass(frozen=True)
class CompositeKey:
    """Product of per-prime keys for a composite modulus."""

    parts: tuple[PairedClassKey, ...]

    @property
    def determinate(self) -> bool:
        return all(k.determinate for k in self.parts)

    def __str__(self) -> str:
        return "|".join(str(k) for k in self.parts)


def parse_key(text: str) -> PairedClassKey | CompositeKey:
    """Inverse of ``str`` on keys."""
    parts = []
    inv = {v: k for k, v in _TAGS.items()}
    for chunk in text.split("|"):
        try:
            p, lam, rest = chunk.split(":")
            lam_t = tuple(int(v) for v in lam.strip("()").split(",") if v)
            parts.append(PairedClassKey(int(p), inv[rest[0]], lam_t, bytes.fromhex(rest[1:])))
        except (ValueError, KeyError, IndexError):
            raise DomainError(f"malformed class key {chunk!r}") from None
    return parts[0] if len(parts) == 1 else CompositeKey(tuple(parts))


# ----------------------------------------------------------------- group type


def _local(m: ModMatrix, p: int | None) -> tuple[np.ndarray, int, int]:
    if m.modulus is None:
        raise DomainError("matrix needs a modulus")
    mod = factorize(m.modulus)
    if p is None:
        if len(mod.factors) != 1:
            raise DomainError("composite modulus: pass the prime explicitly")
        p = mod.factors[0].p
    e = mod.exponent(p)
    if e == 0:
        raise DomainError(f"{p} does not divide the modulus {m.modulus}")
    return np.ascontiguousarray(m.entries % p**e), p, e


def group_type(m: ModMatrix, p: int | None = None) -> GroupType:
    """Elementary-divisor type of ``Cok(M)`` at p, read mod p^e.

    >>> group_type(ModMatrix([[0, 3], [3, 0]], 27)).lam
    (1, 1)
    """
    a, p, e = _local(m, p)
    if m.kind == SYMMETRIC:
        piv, cnt, zeros, _ = _kernels.sym_reduce(a, p, e, False)
        parts = []
        for code, v, *_ in piv[:cnt]:
            parts += [int(v)] * (2 if code else 1)
    elif m.kind == ALTERNATING:
        vals, cnt, zeros, _ = _kernels.alt_reduce(a, p, e, False)
        parts = [int(v) for v in vals[:cnt] for _ in range(2)]
    else:
        sv = _kernels.smith_vals(a, p, e)
        parts = [int(v) for v in sv if v < e]
        zeros = int(np.sum(sv == e))
    return GroupType(tuple(parts) + (e,) * int(zeros), capped=bool(zeros))


def corank_mod_p(m: ModMatrix, p: int | None = None) -> int:
    a, p, _ = _local(m, p)
    return m.n - int(_kernels.rank_mod(a % p, p))


# ------------------------------------------------------------ exact pairing


def bareiss_det(a: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    m = [[int(v) for v in row] for row in a]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def sym_reduce_exact(a: Sequence[Sequence[int]], p: int, e: int) -> tuple[list[tuple], int]:
    """Python-integer twin of the compiled symmetric reduction.

    Works for any p^e; returns ``(pivots, zero_dims)`` in the same encoding.
    """
    q = p**e
    s = [[int(v) % q for v in row] for row in a]
    n = len(s)
    out: list[tuple] = []
    k = 0

    def val(x: int) -> int:
        return e if x == 0 else _vp(x, p)

    def addmul(dst: int, src: int, c: int) -> None:
        for col in range(n):
            s[dst][col] = (s[dst][col] + c * s[src][col]) % q
        for row in range(n):
            s[row][dst] = (s[row][dst] + c * s[row][src]) % q

    def swap(i: int, j: int) -> None:
        s[i], s[j] = s[j], s[i]
        for row in s:
            row[i], row[j] = row[j], row[i]

    while k < n:
        best, bi, bj = e, -1, -1
        for i in range(k, n):
            if val(s[i][i]) < best:
                best, bi, bj = val(s[i][i]), i, i
        for i in range(k, n):
            for j in range(i + 1, n):
                if val(s[i][j]) < best:
                    best, bi, bj = val(s[i][j]), i, j
        if best == e:
            break
        pv, qr = p**best, q // p**best
        if bi != bj and p != 2:
            addmul(bi, bj, 1)
            bj = bi
        if bi == bj:
            swap(k, bi)
            unit = s[k][k] // pv % qr
            uinv = pow(unit, -1, qr)
            for r in range(k + 1, n):
                addmul(r, k, -(s[r][k] // pv) * uinv % q)
            out.append((0, best, unit, 0, 0))
            k += 1
        else:
            swap(k, bi)
            swap(k + 1, bj if bj != k else bi)
            x, y, z = (s[k][k] // pv % qr, s[k][k + 1] // pv % qr, s[k + 1][k + 1] // pv % qr)
            dinv = pow((x * z - y * y) % qr, -1, qr)
            for r in range(k + 2, n):
                w0, w1 = s[r][k] // pv, s[r][k + 1] // pv
                addmul(r, k, -((w0 * z - w1 * y) * dinv) % q)
                addmul(r, k + 1, -((w1 * x - w0 * y) * dinv) % q)
            out.append((1, best, x, y, z))
            k += 2
    return out, n - k


def gram_from_pivots(pivots: Sequence[Sequence[int]], p: int) -> PairingGram:
    """Gram of the inverse pairing on the nil blocks (valuation >= 1).

    Unit parts are integer lifts; the pairing only depends on them up to the
    precision that the caller guarantees.
    """
    blocks = [tuple(int(t) for t in b) for b in pivots if b[1] >= 1]
    blocks.sort(key=lambda b: -b[1])
    lam: list[int] = []
    entries: list[tuple[int, int, int]] = []
    for code, v, x, y, z in blocks:
        q = p**v
        base = len(lam)
        if code == 0:
            lam.append(v)
            entries.append((base, base, pow(x, -1, q)))
        else:
            lam += [v, v]
            dinv = pow((x * z - y * y) % q, -1, q)
            entries += [
                (base, base, z * dinv % q),
                (base, base + 1, -y * dinv % q),
                (base + 1, base, -y * dinv % q),
                (base + 1, base + 1, x * dinv % q),
            ]
    c = [[0] * len(lam) for _ in lam]
    for i, j, val in entries:
        c[i][j] = val
    return PairingGram(p, tuple(lam), tuple(map(tuple, c)))


def pairing_gram(m: np.ndarray | Sequence[Sequence[int]], p: int, e_max: int = E_MAX) -> PairingGram:
    """Gram matrix of ``<x, y> = x^T M^{-1} y mod Z_p`` on the p-part of Cok(M).

    Args:
        m: nonsingular symmetric integer matrix.
        p: the prime.
        e_max: largest working exponent allowed.

    Raises:
        Singular: when ``det M = 0``.
        PrecisionExceeded: when the needed exponent exceeds ``e_max``.
    """
    a = [[int(v) for v in row] for row in np.asarray(m, dtype=object).reshape(len(m), -1)] if len(m) else []
    if any(a[i][j] != a[j][i] for i in range(len(a)) for j in range(len(a))):
        raise StructureError("pairing_gram needs a symmetric matrix")
    det = bareiss_det(a)
    if det == 0:
        raise Singular("matrix is singular")
    total = _vp(abs(det), p)
    if total == 0:
        return PairingGram(p, (), ())
    piv, _ = sym_reduce_exact(a, p, total + 1)
    top = max(v for _, v, *_ in piv)
    work = top + total + 2
    if work > e_max:
        raise PrecisionExceeded(f"need exponent {work} > {e_max}")
    piv, zeros = sym_reduce_exact(a, p, work)
    assert zeros == 0
    return gram_from_pivots(piv, p)


# ------------------------------------------------- brute force on paired groups


class _Group:
    """Elements of ``sum Z/p^lam_i`` as coordinate rows, with pairing tables."""

    def __init__(self, p: int, lam: tuple[int, ...], cap: int):
        size = p ** sum(lam)
        if size > cap:
            raise BudgetExceeded(f"group of order {size} exceeds the cap {cap}")
        self.p, self.lam = p, lam
        self.top = lam[0] if lam else 0
        self.mod = p**self.top
        self.elems = np.array(list(itertools.product(*[range(p**v) for v in lam])), dtype=np.int64).reshape(size, len(lam))
        self._masks: dict[int, np.ndarray] = {}

    def order_mask(self, v: int) -> np.ndarray:
        """Elements whose order divides p^v."""
        if v not in self._masks:
            ok = np.ones(len(self.elems), dtype=bool)
            for k, lk in enumerate(self.lam):
                if lk > v:
                    ok &= self.elems[:, k] % self.p ** (lk - v) == 0
            self._masks[v] = ok
        return self._masks[v]

    def socle(self, h: np.ndarray, v: int) -> np.ndarray:
        """Coordinates of ``p^(v-1) h`` in the socle G[p], as vectors mod p."""
        lamv = np.array(self.lam, dtype=np.int64)
        num = (h * self.p ** (v - 1)) % self.p**lamv
        return num // self.p ** (lamv - 1) % self.p

    def scale_down(self, num: np.ndarray, i_lam: int, j_lam: int) -> np.ndarray:
        """Pairing numerators over p^top -> Gram entries mod p^min."""
        mn = min(i_lam, j_lam)
        return (num % self.mod) // self.p ** (self.top - mn)


def _reduce_against(vecs: np.ndarray, basis: list[tuple[int, np.ndarray]], p: int) -> np.ndarray:
    out = vecs.copy()
    for col, b in basis:
        out = (out - np.outer(out[:, col], b)) % p
    return out


def _extend_basis(basis: list[tuple[int, np.ndarray]], v: np.ndarray, p: int) -> list[tuple[int, np.ndarray]]:
    r = _reduce_against(v[None, :], basis, p)[0]
    col = int(np.nonzero(r)[0][0])
    r = r * pow(int(r[col]), -1, p) % p
    new = [(c, (b - b[col] * r) % p) for c, b in basis]
    return new + [(col, r)]


def min_gram_key(g: PairingGram, cap: int = GROUP_CAP, budget: int = NODE_BUDGET) -> tuple[int, ...]:
    """Least Gram over all bases of the paired group, as a flat tuple.

    Entries are listed column by column over the upper triangle
    (c11, c12, c22, c13, c23, c33, ...), so that fixing the first j basis
    vectors fixes the first j columns. Ties are explored exhaustively.
    Basis vectors are picked in nonincreasing order with independent socle
    images ``p^(lam_j - 1) h_j``, which makes the final map injective.
    """
    grp = _Group(g.p, g.lam, cap)
    s = g.scaled()
    p, lam, m = g.p, g.lam, g.m
    states: list[tuple[list[np.ndarray], list]] = [([], [])]
    key: list[int] = []
    nodes = 0
    for j in range(m):
        mask = grp.order_mask(lam[j])
        cand_all = grp.elems[mask]
        red_all = grp.socle(cand_all, lam[j])
        best = None
        nxt: list[tuple[list[np.ndarray], list]] = []
        for chosen, basis in states:
            indep = np.any(_reduce_against(red_all, basis, p), axis=1)
            cand = cand_all[indep]
            nodes += len(cand)
            if nodes > budget:
                raise BudgetExceeded("minimal-Gram search exceeded its node budget")
            if len(cand) == 0:
                continue
            cols = [grp.scale_down(cand @ (s @ h), lam[i], lam[j]) for i, h in enumerate(chosen)]
            cols.append(grp.scale_down(np.einsum("ij,jk,ik->i", cand, s, cand), lam[j], lam[j]))
            table = np.stack(cols, axis=1)
            order = np.lexsort(table.T[::-1])
            top = tuple(int(v) for v in table[order[0]])
            if best is None or top < best:
                best, nxt = top, []
            if top == best:
                hit = np.all(table == np.array(best), axis=1)
                for idx in np.nonzero(hit)[0]:
                    h = cand[idx]
                    nxt.append((chosen + [h], _extend_basis(basis, grp.socle(h, lam[j]), p)))
        if best is None:
            raise AssertionError("no basis found; the group data is inconsistent")
        key += best
        states = nxt
    return tuple(key)


def split_key(g: PairingGram, cap: int = GROUP_CAP, budget: int = SPLIT_BUDGET) -> tuple[int, ...]:
    """Canonical label of a paired group from its orthogonal splittings.

    At each step the remaining group T is split as ``S + S^perp`` where S is
    generated by elements of the largest order ``p^k`` in T: a cyclic S with
    unit self-pairing when T has such an element, otherwise a 2-generated S
    with unit cross pairing. The label is the least sequence
    ``(k, 1, c)`` / ``(k, 2, a, b, d)`` of Gram entries over all such
    splittings, so isomorphic paired groups get equal labels and a label
    spells out a block-diagonal Gram of its group.
    """
    grp = _Group(g.p, g.lam, cap)
    p, lam = g.p, np.array(g.lam, dtype=np.int64)
    if len(lam) == 0:
        return ()
    elems = grp.elems
    s = g.scaled()
    mod = grp.mod
    # order exponent of every element
    vals = np.zeros_like(elems)
    for k in range(elems.shape[1]):
        col = elems[:, k]
        v = np.zeros(len(col), dtype=np.int64)
        rest = col.copy()
        zero = rest == 0
        for _ in range(int(lam[k])):
            hit = (rest % p == 0) & ~zero
            v += hit
            rest = np.where(hit, rest // p, rest)
        vals[:, k] = np.where(zero, lam[k], v)
    ordexp = np.max(lam[None, :] - vals, axis=1)
    selfp = np.einsum("ij,jk,ik->i", elems, s, elems) % mod
    work = 0
    # full pairing table, int16 whenever the modulus allows
    table = np.empty((len(elems), len(elems)), dtype=np.int16 if mod < 2**15 else np.int64)
    for lo_row in range(0, len(elems), 512):
        table[lo_row:lo_row + 512] = elems[lo_row:lo_row + 512] @ s @ elems.T % mod

    def pairings(hs: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return table[np.ix_(hs, idx)]

    def complements(mask: np.ndarray, idx: np.ndarray, zero: np.ndarray,
                    seen: dict[bytes, np.ndarray]) -> None:
        # rows of ``zero`` flag the members of idx orthogonal to one generator set
        packed = np.packbits(zero, axis=1)
        for i, key in enumerate(map(bytes, packed)):
            if key not in seen:
                sub = mask.copy()
                sub[idx] = zero[i]
                seen[key] = sub

    def expand(mask: np.ndarray) -> tuple[tuple[int, ...], list[np.ndarray]]:
        # least next-block label of the subgroup ``mask`` and the complements reaching it
        nonlocal work
        idx = np.nonzero(mask)[0]
        work += len(idx)
        k = int(ordexp[idx].max())
        top = idx[ordexp[idx] == k]
        scale = mod // p**k
        c = selfp[top] // scale % p**k
        units = top[c % p != 0]
        if len(units):
            cu = selfp[units] // scale % p**k
            cmin = int(cu.min())
            hs = units[cu == cmin]
            work += len(hs) * len(idx)
            found: dict[bytes, np.ndarray] = {}
            complements(mask, idx, pairings(hs, idx) == 0, found)
            return (k, 1, cmin), list(found.values())
        amin = int(c.min())
        firsts = top[c == amin]
        dd_all = selfp[top] // scale % p**k
        pv = pairings(firsts, top) // scale % p**k
        work += pv.size
        # (b, d) packed into one integer, non-unit cross pairings excluded
        packed = np.where(pv % p != 0, pv.astype(np.int64) * p**k + dd_all[None, :], -1)
        packed = np.where(packed < 0, np.iinfo(np.int64).max, packed)
        best_code = int(packed.min())
        if best_code == np.iinfo(np.int64).max:
            raise AssertionError("degenerate pairing reached the splitting search")
        lo = divmod(best_code, p**k)
        rows, cols = np.nonzero(packed == best_code)
        children: dict[bytes, np.ndarray] = {}
        for at in range(0, len(rows), 1024):
            r, q = firsts[rows[at:at + 1024]], top[cols[at:at + 1024]]
            z = (pairings(r, idx) == 0) & (pairings(q, idx) == 0)
            work += z.size
            complements(mask, idx, z, children)
            if work > budget:
                raise BudgetExceeded("splitting search exceeded its node budget")
        return (k, 2, amin) + lo, list(children.values())

    # every surviving state shares the label so far, so blocks compare in place
    states = {b"": np.ones(len(elems), dtype=bool)}
    out: list[int] = []
    while True:
        states = {t: m for t, m in states.items() if m.sum() > 1}
        if not states:
            return tuple(out)
        best: tuple[int, ...] | None = None
        nxt: dict[bytes, np.ndarray] = {}
        for mask in states.values():
            label, children = expand(mask)
            if work > budget:
                raise BudgetExceeded("splitting search exceeded its node budget")
            if best is None or label < best:
                best, nxt = label, {}
            if label == best:
                for ch in children:
                    nxt.setdefault(np.packbits(ch).tobytes(), ch)
        out += best
        states = nxt


def gram_from_split_key(p: int, flat: Sequence[int]) -> PairingGram:
    """Block-diagonal Gram spelled out by a :func:`split_key` label."""
    lam: list[int] = []
    entries: list[tuple[int, int, int]] = []
    i = 0
    while i < len(flat):
        k, shape = flat[i], flat[i + 1]
        base = len(lam)
        if shape == 1:
            lam.append(k)
            entries.append((base, base, flat[i + 2]))
            i += 3
        else:
            a, b, d = flat[i + 2 : i + 5]
            lam += [k, k]
            entries += [(base, base, a), (base, base + 1, b), (base + 1, base, b), (base + 1, base + 1, d)]
            i += 5
    c = [[0] * len(lam) for _ in lam]
    for r, col, v in entries:
        c[r][col] = v
    return PairingGram(p, tuple(lam), tuple(map(tuple, c)))


def _count_isometries(g: PairingGram, cap: int, budget: int) -> int:
    grp = _Group(g.p, g.lam, cap)
    s = g.scaled()
    lam, m = g.lam, g.m
    masks = [grp.order_mask(v) for v in lam]
    nodes = [0]

    def rec(chosen: list[np.ndarray]) -> int:
        j = len(chosen)
        cand = grp.elems[masks[j]]
        nodes[0] += len(cand)
        if nodes[0] > budget:
            raise BudgetExceeded("automorphism enumeration exceeded its node budget")
        ok = np.ones(len(cand), dtype=bool)
        for i, h in enumerate(chosen):
            ok &= grp.scale_down(cand @ (s @ h), lam[i], lam[j]) == g.c[j][i]
        if not g.skew:
            ok &= grp.scale_down(np.einsum("ij,jk,ik->i", cand, s, cand), lam[j], lam[j]) == g.c[j][j]
        hits = cand[ok]
        if j == m - 1:
            return len(hits)
        return sum(rec(chosen + [h]) for h in hits)

    # a map preserving a perfect pairing is injective, hence an automorphism
    return 1 if m == 0 else rec([])


def aut_count_paired(g: PairingGram, cap: int = GROUP_CAP, budget: int = 50 * NODE_BUDGET) -> int:
    """``|Aut(G, <,>)|`` by enumerating images of the generators."""
    return _count_isometries(g, cap, budget)


def standard_alt_gram(p: int, lam: Sequence[int]) -> PairingGram:
    """Standard alternating pairing on ``H + H`` with generators e1, f1, e2, f2, ..."""
    lam = sorted((int(v) for v in lam if v > 0), reverse=True)
    full = tuple(v for v in lam for _ in range(2))
    m = len(full)
    c = [[0] * m for _ in range(m)]
    for i in range(len(lam)):
        q = p ** lam[i]
        c[2 * i][2 * i + 1] = 1
        c[2 * i + 1][2 * i] = q - 1
    return PairingGram(p, full, tuple(map(tuple, c)), skew=True)


def sp_count(h: GroupType | Sequence[int], p: int, cap: int = GROUP_CAP, budget: int = 50 * NODE_BUDGET) -> int:
    """``|Sp(H + H)|`` by brute force."""
    lam = h.lam if isinstance(h, GroupType) else tuple(h)
    return _count_isometries(standard_alt_gram(p, lam), cap, budget)


# ------------------------------------------------------------ class keys


def _encode(values: Sequence[int]) -> bytes:
    return b"".join(int(v).to_bytes(4, "big") for v in values)


def _decode(payload: bytes) -> list[int]:
    return [int.from_bytes(payload[i : i + 4], "big") for i in range(0, len(payload), 4)]


def sym_key_from_pivots(
    pivots: np.ndarray, count: int, zeros: int, p: int, e: int, cap: int = GROUP_CAP
) -> PairedClassKey:
    """Key of the nil part described by raw reduction output."""
    nil = [tuple(int(t) for t in row) for row in pivots[:count] if row[1] >= 1]
    lam: list[int] = []
    for code, v, *_ in nil:
        lam += [v] * (2 if code else 1)
    lam += [e] * zeros
    lam_t = tuple(sorted(lam, reverse=True))
    if p != 2:
        canon = canonical_from_pivots(np.array(nil, dtype=np.int64).reshape(-1, 5), len(nil), 0, p, e)
        r = smallest_nonsquare(p)
        flags, last = [], {}
        for v, eps in zip(canon.lam, canon.eps):
            last[v] = eps
        for v in sorted(last, reverse=True):
            flags.append(1 if last[v] == r else 0)
        kind = UNDETERMINED if zeros else SYM_PAIRED
        return PairedClassKey(p, kind, lam_t, bytes(flags))
    if zeros or (nil and max(b[1] for b in nil) > e - 3):
        return PairedClassKey(p, UNDETERMINED, lam_t)
    gram = gram_from_pivots(nil, p)
    return PairedClassKey(p, SYM_PAIRED, gram.lam, _encode(split_key(gram, cap)))


def alt_key_from_reduction(vals: np.ndarray, count: int, zeros: int, n: int, p: int, e: int) -> PairedClassKey:
    h = tuple(sorted((int(v) for v in vals[:count] if v >= 1), reverse=True))
    if zeros == n % 2:
        return PairedClassKey(p, ALT_GROUP, h, bytes([n % 2]))
    capped = (zeros - n % 2) // 2
    return PairedClassKey(p, UNDETERMINED, h + (e,) * capped, bytes([zeros]))


def _prime_key(m: ModMatrix, p: int, cap: int) -> PairedClassKey:
    a, p, e = _local(m, p)
    if m.kind == SYMMETRIC:
        piv, cnt, zeros, _ = _kernels.sym_reduce(a, p, e, False)
        return sym_key_from_pivots(piv, int(cnt), int(zeros), p, e, cap)
    if m.kind == ALTERNATING:
        vals, cnt, zeros, _ = _kernels.alt_reduce(a, p, e, False)
        return alt_key_from_reduction(vals, int(cnt), int(zeros), m.n, p, e)
    raise StructureError("quasi_class needs a symmetric or alternating matrix")


def quasi_class(m: ModMatrix, cap: int = GROUP_CAP) -> PairedClassKey | CompositeKey:
    """Quasi-pairing class key of ``M`` mod its modulus.

    A prime-power modulus gives a :class:`PairedClassKey`; a composite one
    gives a :class:`CompositeKey` with one part per prime.
    """
    if m.kind == GENERAL:
        raise StructureError("quasi_class needs a symmetric or alternating matrix")
    mod = factorize(m.modulus) if m.modulus is not None else None
    if mod is None:
        raise DomainError("quasi_class needs a modulus")
    keys = tuple(_prime_key(m, f.p, cap) for f in mod.factors)
    return keys[0] if len(keys) == 1 else CompositeKey(keys)


def paired_iso(m1: ModMatrix, m2: ModMatrix) -> bool:
    """Whether two matrices have isomorphic paired cokernels (determinate keys)."""
    if m1.modulus != m2.modulus:
        raise DomainError("matrices must share a modulus")
    k1, k2 = quasi_class(m1), quasi_class(m2)
    if not (k1.determinate and k2.determinate):
        raise Indeterminate("a key is undetermined at this modulus")
    return k1 == k2


def key_gram(key: PairedClassKey) -> PairingGram:
    """A Gram matrix realising a determinate symmetric key."""
    if key.kind != SYM_PAIRED:
        raise Indeterminate(f"key {key} carries no pairing")
    p, lam = key.p, key.lam
    if p == 2:
        return gram_from_split_key(p, _decode(key.payload))
    r = smallest_nonsquare(p)
    runs = sorted(set(lam), reverse=True)
    flags = dict(zip(runs, key.payload))
    c = [[0] * len(lam) for _ in lam]
    for i, v in enumerate(lam):
        last = i == len(lam) - 1 or lam[i + 1] != v
        eps = r if (last and flags[v]) else 1
        c[i][i] = pow(eps, -1, p**v)
    return PairingGram(p, lam, tuple(map(tuple, c)))


def aut_of_key(key: PairedClassKey, cap: int = GROUP_CAP) -> int:
    return aut_count_paired(key_gram(key), cap)


def alt_type(a: ModMatrix) -> tuple[GroupType, int]:
    """Type of H (torsion = H + H) and the residual corank of an alternating matrix.

    The residual corank counts dimensions that vanish mod p^e after
    symplectic reduction: 0 for a nonsingular even matrix, at least 1 for odd
    size. Pairs of vanished dimensions beyond the parity slot are reported as
    capped parts of H.
    """
    arr, p, e = _local(a, None)
    if a.kind != ALTERNATING:
        raise StructureError("alt_type needs an alternating matrix")
    vals, cnt, zeros, _ = _kernels.alt_reduce(arr, p, e, False)
    h = [int(v) for v in vals[:cnt] if v >= 1]
    capped = (int(zeros) - a.n % 2) // 2
    return GroupType(tuple(h) + (e,) * capped, capped=capped > 0), int(zeros)
