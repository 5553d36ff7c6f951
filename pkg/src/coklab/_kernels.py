"""Compiled elimination kernels over Z/p^e.

All kernels take an ``int64`` matrix with entries in ``[0, p**e)`` and work on a
private copy. Moduli must stay below 2**31 so that products fit in ``int64``.

Output encoding of ``sym_reduce`` (one row per pivot, columns):
    0: shape code, 0 for a 1x1 pivot and 1 for a 2x2 block
    1: valuation v of the pivot
    2..4: the pivot divided by p**v, reduced mod p**(e-v); for a 1x1 pivot
          only column 2 is used, for a 2x2 block columns 2..4 hold a, b, c of
          [[a, b], [b, c]]
"""

from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old on some systems; prefer OpenMP unless overridden
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@njit(cache=True)
def _val(x, p, e):
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True)
def _inv(x, m):
    # extended Euclid; x must be a unit mod m
    a, b = x % m, m
    s0, s1 = 1, 0
    while b:
        qt = a // b
        a, b = b, a - qt * b
        s0, s1 = s1, s0 - qt * s1
    return s0 % m


@njit(cache=True)
def _swap(s, u, i, j, track):
    if i == j:
        return
    n = s.shape[0]
    for c in range(n):
        t = s[i, c]
        s[i, c] = s[j, c]
        s[j, c] = t
    for r in range(n):
        t = s[r, i]
        s[r, i] = s[r, j]
        s[r, j] = t
    if track:
        for c in range(n):
            t = u[i, c]
            u[i, c] = u[j, c]
            u[j, c] = t


@njit(cache=True)
def _addmul(s, u, dst, src, c, q, k0, track):
    # row dst += c * row src and column dst += c * column src (a congruence)
    n = s.shape[0]
    if c == 0:
        return
    for col in range(k0, n):
        s[dst, col] = (s[dst, col] + c * s[src, col]) % q
    for row in range(k0, n):
        s[row, dst] = (s[row, dst] + c * s[row, src]) % q
    if track:
        for col in range(n):
            u[dst, col] = (u[dst, col] + c * u[src, col]) % q


@njit(cache=True)
def sym_reduce(a, p, e, track):
    """Congruence-reduce a symmetric matrix mod p^e.

    Returns ``(pivots, count, zero_dims, U)`` with ``U a U^T`` block diagonal
    (when ``track``) in the pivot order recorded in ``pivots[:count]``.
    """
    n = a.shape[0]
    q = 1
    for _ in range(e):
        q *= p
    s = a.copy() % q
    u = np.eye(n, dtype=np.int64)
    out = np.zeros((n, 5), dtype=np.int64)
    cnt = 0
    k = 0
    while k < n:
        best = e
        bi = -1
        bj = -1
        # lowest valuation; prefer diagonal on ties, lowest index first
        for i in range(k, n):
            v = _val(s[i, i], p, e)
            if v < best:
                best = v
                bi = i
                bj = i
                if v == 0:
                    break
        if best > 0:
            for i in range(k, n):
                for j in range(i + 1, n):
                    v = _val(s[i, j], p, e)
                    if v < best:
                        best = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
                if best == 0:
                    break
        if best == e:
            break
        pv = 1
        for _ in range(best):
            pv *= p
        qr = q // pv
        if bi != bj and p != 2:
            # row/col addition turns the off-diagonal unit into a diagonal one
            _addmul(s, u, bi, bj, 1, q, k, track)
            bj = bi
        if bi == bj:
            _swap(s, u, k, bi, track)
            unit = (s[k, k] // pv) % qr
            uinv = _inv(unit, qr)
            for r in range(k + 1, n):
                t = s[r, k] // pv
                c = (q - (t * uinv) % q) % q
                _addmul(s, u, r, k, c, q, k, track)
            out[cnt, 0] = 0
            out[cnt, 1] = best
            out[cnt, 2] = unit
            cnt += 1
            k += 1
        else:
            _swap(s, u, k, bi, track)
            jj = bj
            if jj == k:
                jj = bi
            _swap(s, u, k + 1, jj, track)
            x = (s[k, k] // pv) % qr
            y = (s[k, k + 1] // pv) % qr
            z = (s[k + 1, k + 1] // pv) % qr
            det = (x * z - y * y) % qr
            dinv = _inv(det, qr)
            # inverse of [[x, y], [y, z]] is dinv * [[z, -y], [-y, x]]
            for r in range(k + 2, n):
                w0 = s[r, k] // pv
                w1 = s[r, k + 1] // pv
                c0 = ((w0 * z - w1 * y) % qr) * dinv % qr
                c1 = ((w1 * x - w0 * y) % qr) * dinv % qr
                _addmul(s, u, r, k, (q - c0) % q, q, k, track)
                _addmul(s, u, r, k + 1, (q - c1) % q, q, k, track)
            out[cnt, 0] = 1
            out[cnt, 1] = best
            out[cnt, 2] = x
            out[cnt, 3] = y
            out[cnt, 4] = z
            cnt += 1
            k += 2
    return out, cnt, n - k, u


@njit(cache=True)
def alt_reduce(a, p, e, track):
    """Symplectic reduction of an alternating matrix mod p^e.

    Returns ``(vals, count, zero_dims, U)``: block ``i`` is
    ``[[0, p^v u], [-p^v u, 0]]`` with ``v = vals[i]``.
    """
    n = a.shape[0]
    q = 1
    for _ in range(e):
        q *= p
    s = a.copy() % q
    u = np.eye(n, dtype=np.int64)
    vals = np.zeros(n // 2 + 1, dtype=np.int64)
    cnt = 0
    k = 0
    while k + 1 < n:
        best = e
        bi = -1
        bj = -1
        for i in range(k, n):
            for j in range(i + 1, n):
                v = _val(s[i, j], p, e)
                if v < best:
                    best = v
                    bi = i
                    bj = j
                    if v == 0:
                        break
            if best == 0:
                break
        if best == e:
            break
        pv = 1
        for _ in range(best):
            pv *= p
        qr = q // pv
        _swap(s, u, k, bi, track)
        jj = bj
        if jj == k:
            jj = bi
        _swap(s, u, k + 1, jj, track)
        b = (s[k, k + 1] // pv) % qr
        binv = _inv(b, qr)
        for r in range(k + 2, n):
            w0 = s[r, k] // pv
            w1 = s[r, k + 1] // pv
            # row r -= (w1/b) row k - (w0/b) row k+1
            c0 = w1 * binv % qr
            c1 = (qr - w0 * binv % qr) % qr
            _addmul(s, u, r, k, (q - c0) % q, q, k, track)
            _addmul(s, u, r, k + 1, (q - c1) % q, q, k, track)
        for i in range(k, n):
            s[i, i] = 0
        vals[cnt] = best
        cnt += 1
        k += 2
    return vals, cnt, n - 2 * cnt, u


@njit(cache=True)
def smith_vals(a, p, e):
    """Valuations of the elementary divisors of a general matrix mod p^e."""
    n = a.shape[0]
    q = 1
    for _ in range(e):
        q *= p
    s = a.copy() % q
    vals = np.full(n, e, dtype=np.int64)
    for k in range(n):
        best = e
        bi = -1
        bj = -1
        for i in range(k, n):
            for j in range(k, n):
                v = _val(s[i, j], p, e)
                if v < best:
                    best = v
                    bi = i
                    bj = j
        if best == e:
            break
        for c in range(n):
            t = s[k, c]
            s[k, c] = s[bi, c]
            s[bi, c] = t
        for r in range(n):
            t = s[r, k]
            s[r, k] = s[r, bj]
            s[r, bj] = t
        pv = 1
        for _ in range(best):
            pv *= p
        qr = q // pv
        uinv = _inv((s[k, k] // pv) % qr, qr)
        for r in range(k + 1, n):
            c = (s[r, k] // pv) * uinv % qr
            if c:
                for col in range(k, n):
                    s[r, col] = (s[r, col] - c * s[k, col]) % q
        for col in range(k + 1, n):
            c = (s[k, col] // pv) * uinv % qr
            if c:
                for r in range(k, n):
                    s[r, col] = (s[r, col] - c * s[r, k]) % q
        vals[k] = best
    return vals


@njit(cache=True)
def rank_mod(a, p):
    """Rank over F_p for a prime p < 2**31."""
    s = a.copy() % p
    rows, cols = s.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if s[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                t = s[r, j]
                s[r, j] = s[piv, j]
                s[piv, j] = t
        inv = _inv(s[r, c], p)
        for j in range(c, cols):
            s[r, j] = s[r, j] * inv % p
        for i in range(r + 1, rows):
            f = s[i, c]
            if f:
                for j in range(c, cols):
                    s[i, j] = (s[i, j] - f * s[r, j]) % p
        r += 1
    return r


@njit(cache=True)
def corner_coranks(a, p, alt):
    """Corank mod p of every leading t x t corner, t = 0..n.

    Keeps an invertible L with ``L M_t L^T`` block diagonal (1x1 and 2x2
    invertible blocks plus a zero tail) and extends it by one row per step,
    so the sweep costs O(n^3) in total.
    """
    n = a.shape[0]
    s = a % p
    out = np.zeros(n + 1, dtype=np.int64)
    lm = np.zeros((n, n), dtype=np.int64)
    d = np.zeros((n, n), dtype=np.int64)
    # part[i]: -1 for a 1x1 block, -2 for the zero tail, else the partner
    part = np.full(n, -2, dtype=np.int64)
    eta = np.zeros(n, dtype=np.int64)
    l = np.zeros(n, dtype=np.int64)
    cor = 0
    for t in range(n):
        for i in range(t):
            acc = 0
            for c in range(t):
                acc = (acc + lm[i, c] * s[c, t]) % p
            eta[i] = acc
        for c in range(n):
            l[c] = 0
        l[t] = 1
        zp = 0 if alt else s[t, t]
        for i in range(t):
            if part[i] == -1:
                x = eta[i] * _inv(d[i, i], p) % p
                if x:
                    for c in range(t):
                        l[c] = (l[c] - x * lm[i, c]) % p
                    zp = (zp - x * eta[i]) % p
            elif part[i] >= 0 and part[i] > i:
                j = part[i]
                # solve B x = (eta_i, eta_j) with B = d[[i, j]][:, [i, j]]
                b00 = d[i, i]
                b01 = d[i, j]
                b10 = d[j, i]
                b11 = d[j, j]
                det = (b00 * b11 - b01 * b10) % p
                dinv = _inv(det, p)
                xi = (b11 * eta[i] - b01 * eta[j]) % p * dinv % p
                xj = (b00 * eta[j] - b10 * eta[i]) % p * dinv % p
                if xi or xj:
                    for c in range(t):
                        l[c] = (l[c] - xi * lm[i, c] - xj * lm[j, c]) % p
                    if not alt:
                        zp = (zp - xi * eta[i] - xj * eta[j]) % p
        k = -1
        for i in range(t):
            if part[i] == -2 and eta[i] != 0:
                k = i
                break
        for c in range(n):
            lm[t, c] = l[c]
        if k < 0:
            if zp != 0:
                part[t] = -1
                d[t, t] = zp
            else:
                part[t] = -2
                cor += 1
        else:
            ik = _inv(eta[k], p)
            for j in range(k + 1, t):
                if part[j] == -2 and eta[j] != 0:
                    f = eta[j] * ik % p
                    for c in range(t):
                        lm[j, c] = (lm[j, c] - f * lm[k, c]) % p
            part[k] = t
            part[t] = k
            d[k, k] = 0
            d[k, t] = eta[k]
            d[t, k] = (p - eta[k]) % p if alt else eta[k]
            d[t, t] = zp
            cor -= 1
        out[t + 1] = cor
    return out


@njit(parallel=True, cache=True)
def sym_reduce_batch(batch, p, e):
    """``sym_reduce`` over a stack of matrices; no transform tracking."""
    m, n, _ = batch.shape
    piv = np.zeros((m, n, 5), dtype=np.int64)
    cnt = np.zeros(m, dtype=np.int64)
    zer = np.zeros(m, dtype=np.int64)
    for b in prange(m):
        o, c, z, _u = sym_reduce(batch[b], p, e, False)
        piv[b] = o
        cnt[b] = c
        zer[b] = z
    return piv, cnt, zer


@njit(parallel=True, cache=True)
def alt_reduce_batch(batch, p, e):
    m, n, _ = batch.shape
    vals = np.zeros((m, n // 2 + 1), dtype=np.int64)
    cnt = np.zeros(m, dtype=np.int64)
    zer = np.zeros(m, dtype=np.int64)
    for b in prange(m):
        v, c, z, _u = alt_reduce(batch[b], p, e, False)
        vals[b] = v
        cnt[b] = c
        zer[b] = z
    return vals, cnt, zer


@njit(parallel=True, cache=True)
def rank_batch(batch, p):
    m = batch.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for b in prange(m):
        out[b] = rank_mod(batch[b], p)
    return out


@njit(parallel=True, cache=True)
def corner_coranks_batch(batch, p, alt):
    m, n, _ = batch.shape
    out = np.zeros((m, n + 1), dtype=np.int64)
    for b in prange(m):
        out[b] = corner_coranks(batch[b], p, alt)
    return out
