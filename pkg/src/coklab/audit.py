"""Checkers for the non-sparsity events and the small analytic lemmas.

Indices in reports are 0-based. Witness order is deterministic: candidates
are compared by weight, then by support, then by their nonzero values, and
the least violating candidate is reported.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal, localcontext
from typing import Sequence

import numpy as np

from .errors import DomainError, NotApplicable
from .matrices import ModMatrix, rank_mod_p
from .ring import is_prime
from .sampling import EntryDistribution, epsilon_of

PASS_EXHAUSTIVE = "pass-exhaustive"
PASS_SEARCH = "pass-search"
VIOLATED = "violated"
SYM_WINDOW = "sym-window"
ALT_ALL = "alt-all"
DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class AuditParams:
    """Thresholds of the non-sparsity events; defaults are the asymptotic ones."""

    window_start: float = 1 / 1000
    beta: float = 3 / 4
    gamma: float = 1 / 100
    corank_exponent: float = 2 / 3
    comb_weight: float | None = None

    def __post_init__(self) -> None:
        for name in ("window_start", "beta", "gamma", "corank_exponent"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    def weight_bound(self, n: int) -> float:
        return 0.5 * math.sqrt(n) if self.comb_weight is None else self.comb_weight


@dataclass
class NonSparsityReport:
    event: str
    verdict: str
    witness: dict | None = None
    params: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict != VIOLATED

    def to_dict(self) -> dict:
        return asdict(self)


def _as_array(m: ModMatrix | np.ndarray, p: int) -> np.ndarray:
    a = m.entries if isinstance(m, ModMatrix) else np.asarray(m, dtype=np.int64)
    return np.ascontiguousarray(a % p)


def corank(m: ModMatrix | np.ndarray, p: int) -> int:
    a = _as_array(m, p)
    return a.shape[0] - rank_mod_p(a, p)


def check_corank_event(m: ModMatrix | np.ndarray, p: int, c: float = 2 / 3, event: str = "S1") -> NonSparsityReport:
    """Passes iff ``corank(M mod p) <= n^c``."""
    a = _as_array(m, p)
    n = a.shape[0]
    k = corank(a, p)
    bound = n**c
    verdict = PASS_EXHAUSTIVE if k <= bound + 1e-12 else VIOLATED
    witness = {"corank": k, "bound": bound} if verdict == VIOLATED else None
    return NonSparsityReport(event, verdict, witness, {"p": p, "exponent": c, "n": n}, {"corank": k})


# ---------------------------------------------------------- orthogonality


def hamming_vol(p: int, n: int, t: int) -> int:
    """Number of vectors in F_p^n with at most t nonzero entries."""
    if t < 0:
        return 0
    return sum(math.comb(n, i) * (p - 1) ** i for i in range(min(t, n) + 1))


def _candidates(n: int, p: int, w: int, chunk: int = 50000):
    """Vectors of weight exactly w in order (support, values), in chunks."""
    vals = list(itertools.product(range(1, p), repeat=w))
    buf: list[np.ndarray] = []
    for sup in itertools.combinations(range(n), w):
        for v in vals:
            x = np.zeros(n, dtype=np.int64)
            x[list(sup)] = v
            buf.append(x)
            if len(buf) == chunk:
                yield np.array(buf)
                buf = []
    if buf:
        yield np.array(buf)


def _window(n: int, mode: str, params: AuditParams) -> np.ndarray:
    if mode == SYM_WINDOW:
        return np.arange(int(math.floor(params.window_start * n)), n)
    if mode == ALT_ALL:
        return np.arange(n)
    raise DomainError(f"unknown mode {mode!r}")


def orthogonality_set(a: np.ndarray, xi: Sequence[int], p: int, rows: np.ndarray) -> list[int]:
    """Rows in ``rows`` of ``a mod p`` that are not orthogonal to ``xi``."""
    prod = (a[rows] % p) @ (np.asarray(xi, dtype=np.int64) % p) % p
    return [int(r) for r, v in zip(rows, prod) if v]


def check_orthogonality_event(
    m: ModMatrix | np.ndarray,
    p: int,
    params: AuditParams = AuditParams(),
    mode: str = SYM_WINDOW,
    exhaustive: bool = True,
    w_max: int = 3,
    budget: int = DEFAULT_BUDGET,
) -> NonSparsityReport:
    """Look for a sparse nonzero ``xi`` orthogonal to almost all window rows.

    A violation needs ``wt(xi) < gamma n`` and ``#I <= n^beta``, so the
    exhaustive mode walks the whole Hamming ball of radius ``ceil(gamma n) - 1``
    and is complete. When that ball exceeds ``budget`` the search falls back
    to weights ``<= w_max`` and the verdict is downgraded to a search pass.
    """
    a = _as_array(m, p)
    n = a.shape[0]
    rows = _window(n, mode, params)
    i_bound = n**params.beta
    radius = math.ceil(params.gamma * n - 1e-12) - 1
    event = "S2" if mode == SYM_WINDOW else "A2"
    complete = exhaustive and hamming_vol(p, n, radius) <= budget
    top = radius if complete else min(radius, w_max)
    info = {"p": p, "n": n, "mode": mode, "i_bound": i_bound, "weight_below": params.gamma * n, **asdict(params)}
    checked = 0
    rows_mat = a[rows]
    for w in range(1, top + 1):
        for cand in _candidates(n, p, w):
            checked += len(cand)
            nz = np.count_nonzero(rows_mat @ cand.T % p, axis=0)
            hit = np.flatnonzero(nz <= i_bound + 1e-12)
            if len(hit):
                xi = cand[hit[0]]
                wit = {"xi": xi.tolist(), "I": orthogonality_set(a, xi, p, rows), "weight": w}
                return NonSparsityReport(event, VIOLATED, wit, info, {"checked": checked, "max_weight": top})
    verdict = PASS_EXHAUSTIVE if complete else PASS_SEARCH
    return NonSparsityReport(event, verdict, None, info, {"checked": checked, "max_weight": top, "vacuous": radius < 1})


def revalidate(report: NonSparsityReport, m: ModMatrix | np.ndarray) -> bool:
    """Recompute a violation from its witness alone."""
    if report.verdict != VIOLATED:
        return False
    pr = report.params
    p, n = pr["p"], pr["n"]
    a = _as_array(m, p)
    if report.event in ("S1", "A1", "S1p"):
        return corank(a, p) > n ** pr["exponent"] + 1e-12
    if report.event in ("S2", "A2"):
        params = AuditParams(pr["window_start"], pr["beta"], pr["gamma"], pr["corank_exponent"], pr["comb_weight"])
        xi = np.asarray(report.witness["xi"])
        i_set = orthogonality_set(a, xi, p, _window(n, pr["mode"], params))
        wt = int(np.count_nonzero(xi % p))
        return wt >= 1 and wt < params.gamma * n and len(i_set) <= n**params.beta + 1e-12 and i_set == report.witness["I"]
    if report.event == "S2p":
        w = report.witness
        vec = _sdagger_vectors(a, w["I2"])
        if vec is None:
            return False
        comb = np.asarray(w["coefficients"]) @ vec % 2
        return comb.tolist() == w["vector"] and int(comb.sum()) < pr["weight_bound"]
    raise DomainError(f"unknown event {report.event}")


# -------------------------------------------------------------- p = 2 revision


def inv_f2(a: np.ndarray) -> np.ndarray | None:
    """Inverse over F_2, or None when singular."""
    n = a.shape[0]
    aug = np.concatenate([a % 2, np.eye(n, dtype=np.int64)], axis=1).astype(np.uint8)
    for c in range(n):
        piv = np.flatnonzero(aug[c:, c])
        if len(piv) == 0:
            return None
        r = c + piv[0]
        if r != c:
            aug[[c, r]] = aug[[r, c]]
        mask = aug[:, c].astype(bool)
        mask[c] = False
        aug[mask] ^= aug[c]
    return aug[:, n:].astype(np.int64)


def _sdagger_vectors(a: np.ndarray, i2: Sequence[int]) -> np.ndarray | None:
    """Rows: the columns of ``A_CC^-1 A_CI`` then the diagonal of ``A_CC^-1``."""
    n = a.shape[0]
    comp = [i for i in range(n) if i not in set(i2)]
    inv = inv_f2(a[np.ix_(comp, comp)])
    if inv is None:
        return None
    cols = inv @ a[np.ix_(comp, list(i2))] % 2
    return np.vstack([cols.T, np.diag(inv)[None, :]]).astype(np.int64) % 2


def check_sdagger(m: ModMatrix | np.ndarray, params: AuditParams = AuditParams(), max_size: int | None = None) -> NonSparsityReport:
    """Revised p = 2 condition on every small index set ``I2``.

    Each ``I2`` with ``|I2| <= n^(1/4)`` passes if its complement block is
    singular, or if every nonzero combination of the inverse-transported
    columns and the inverse diagonal has at least ``weight_bound`` nonzero
    entries.
    """
    a = _as_array(m, 2)
    n = a.shape[0]
    size = int(math.floor(n**0.25 + 1e-12)) if max_size is None else max_size
    bound = params.weight_bound(n)
    info = {"p": 2, "n": n, "max_size": size, "weight_bound": bound, **asdict(params)}
    singular = 0
    for k in range(size + 1):
        coeffs = np.array([c for c in itertools.product((0, 1), repeat=k + 1) if any(c)], dtype=np.int64)
        for i2 in itertools.combinations(range(n), k):
            vec = _sdagger_vectors(a, i2)
            if vec is None:
                singular += 1
                continue
            combos = coeffs @ vec % 2
            wts = combos.sum(axis=1)
            bad = np.flatnonzero(wts < bound)
            if len(bad):
                b = bad[0]
                wit = {"I2": list(i2), "coefficients": coeffs[b].tolist(), "vector": combos[b].tolist(), "weight": int(wts[b])}
                return NonSparsityReport("S2p", VIOLATED, wit, info, {"singular_sets": singular})
    return NonSparsityReport("S2p", PASS_EXHAUSTIVE, None, info, {"singular_sets": singular})


def principal_minor_census(m: ModMatrix | np.ndarray) -> int:
    """Number of invertible (n-1) x (n-1) principal minors mod 2."""
    a = _as_array(m, 2)
    n = a.shape[0]
    count = 0
    for i in range(n):
        keep = [j for j in range(n) if j != i]
        if rank_mod_p(a[np.ix_(keep, keep)], 2) == n - 1:
            count += 1
    return count


def inverse_diagonal_check(n: int) -> tuple[int, int]:
    """Over all invertible symmetric n x n matrices mod 2, compare zero diagonals.

    Returns ``(checked, failures)`` where a failure is a matrix whose diagonal
    vanishes while that of its inverse does not, or the reverse.
    """
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    checked = failures = 0
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        a = np.zeros((n, n), dtype=np.int64)
        for (i, j), b in zip(pairs, bits):
            a[i, j] = a[j, i] = b
        inv = inv_f2(a)
        if inv is None:
            continue
        checked += 1
        if (not np.diag(a).any()) != (not np.diag(inv).any()):
            failures += 1
    return checked, failures


# -------------------------------------------------------------- analytic bounds


def char_bound_check(d: EntryDistribution, a: int) -> tuple[float, float, bool]:
    """Character sum ``|E exp(2 pi i z / a)|`` against ``exp(-eps / a^2)``.

    Raises:
        NotApplicable: if the distribution has ``eps = 0``.
    """
    eps = epsilon_of(d)
    if eps <= 0:
        raise NotApplicable("point mass: eps = 0")
    lhs = abs(sum(w * cmath.exp(2j * math.pi * v / a) for v, w in zip(d.support, d.probs)))
    rhs = math.exp(-eps / a**2)
    return lhs, rhs, lhs <= rhs + 1e-12


def entropy(p: int, x: float) -> float:
    """The p-ary entropy function."""
    if not 0 < x < 1:
        raise DomainError("entropy needs 0 < x < 1")
    lg = lambda t: math.log(t, p)  # noqa: E731
    return x * lg(p - 1) - x * lg(x) - (1 - x) * lg(1 - x)


def hamming_bound_check(p: int, n: int, x: float) -> tuple[int, Decimal, bool]:
    """``Vol_p(n, x n) <= p^(H_p(x) n)`` with the right side at 50 digits.

    Returns ``(volume, bound, passed)``; the margin is ``bound - volume``.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if not 0 < x < 1 - 1 / p:
        raise DomainError("need 0 < x < 1 - 1/p")
    vol = hamming_vol(p, n, int(math.floor(x * n + 1e-12)))
    with localcontext() as ctx:
        ctx.prec = 50
        dx, dp = Decimal(repr(x)), Decimal(p)
        h = (dx * (dp - 1).ln() - dx * dx.ln() - (1 - dx) * (1 - dx).ln()) / dp.ln()
        bound = (h * n * dp.ln()).exp()
    return vol, bound, Decimal(vol) <= bound.to_integral_value(rounding="ROUND_CEILING")


# -------------------------------------------------------------- suites


def random_distribution(rng: np.random.Generator, a: int) -> EntryDistribution:
    """Random law on Z/a with at least two support points and eps > 0."""
    while True:
        k = int(rng.integers(2, a + 1))
        support = sorted(rng.choice(a, size=k, replace=False).tolist())
        d = EntryDistribution(tuple(support), tuple(rng.dirichlet(np.ones(k)).tolist()), "random")
        if epsilon_of(d) > 0:
            return d


def char_suite(count: int = 500, seed: int = 0, a_max: int = 10) -> dict:
    rng = np.random.default_rng(seed)
    passed, worst = 0, math.inf
    for _ in range(count):
        a = int(rng.integers(2, a_max + 1))
        lhs, rhs, ok = char_bound_check(random_distribution(rng, a), a)
        passed += ok
        worst = min(worst, rhs - lhs)
    return {"total": count, "passed": passed, "min_margin": worst}


def hamming_grid(primes: Sequence[int] = (2, 3, 5), n_max: int = 30) -> dict:
    total = passed = 0
    failures = []
    for p in primes:
        for n in range(1, n_max + 1):
            for i in range(1, 20):
                x = round(0.05 * i, 2)
                if not x < 1 - 1 / p:
                    continue
                total += 1
                _vol, _bound, ok = hamming_bound_check(p, n, x)
                passed += ok
                if not ok:
                    failures.append([p, n, x])
    return {"total": total, "passed": passed, "failures": failures}


def entropy_identities(primes: Sequence[int] = (2, 3, 5)) -> dict:
    vals = {str(p): entropy(p, 1 - 1 / p) for p in primes}
    return {"H_p(1-1/p)": vals, "H_2(1/2)": entropy(2, 0.5), "passed": all(abs(v - 1) < 1e-12 for v in vals.values())}
