"""Command-line front end.

Exit codes: 0 success, 2 usage or malformed input, 3 indeterminate at the
given precision, 4 enumeration budget exceeded. Statistical outcomes never
change the exit code.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import audit, exposure
from .cokernel import (
    GroupType,
    PairingGram,
    alt_type,
    aut_count_paired,
    key_gram,
    quasi_class,
    sp_count,
)
from .errors import BudgetExceeded, CoklabError, Indeterminate, InsufficientPrecision
from .limits import (
    modulus_for,
    mu_inf_alt_even,
    mu_inf_alt_odd,
    mu_inf_sym,
    nu_inf_alt_even,
    nu_inf_alt_odd,
    nu_inf_sym,
    product_alt_odd,
    product_sym,
)
from .matrices import ALTERNATING, SYMMETRIC, ModMatrix
from .ring import factorize
from .sampling import EntryDistribution, sample_alt, sample_sym

EXIT_OK, EXIT_USAGE, EXIT_INDETERMINATE, EXIT_BUDGET = 0, 2, 3, 4
KINDS = {"sym": SYMMETRIC, "symmetric": SYMMETRIC, "alt": ALTERNATING, "alternating": ALTERNATING}


class UsageError(Exception):
    pass


def version() -> str:
    try:
        return metadata.version("coklab")
    except metadata.PackageNotFoundError:
        return "unknown"


# ---------------------------------------------------------------- parsing helpers


def _load_json(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("[", "{")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from None


def _matrix_arg(args) -> tuple[np.ndarray, str | None, int | None]:
    """Entries, kind and modulus from ``--matrix`` (list or object JSON)."""
    raw = _load_json(args.matrix)
    kind = modulus = None
    if isinstance(raw, dict):
        kind, modulus = raw.get("kind"), raw.get("modulus")
        raw = raw.get("entries")
    try:
        a = np.array(raw, dtype=np.int64)
    except (TypeError, ValueError):
        raise UsageError("matrix entries must be integers") from None
    if a.size == 0:
        a = a.reshape(0, 0)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError("matrix must be square")
    return a, kind, modulus


def _modulus_arg(args, fallback: int | None) -> int:
    if getattr(args, "modulus", None):
        return int(args.modulus)
    if getattr(args, "prime", None):
        return int(args.prime) ** int(args.exp or 1)
    if fallback:
        return int(fallback)
    raise UsageError("give --modulus or --prime/--exp")


def _kind_of(a: np.ndarray, requested: str | None) -> str:
    if requested:
        if requested not in KINDS:
            raise UsageError(f"unknown kind {requested!r}")
        return KINDS[requested]
    if np.array_equal(a, a.T):
        return SYMMETRIC
    if np.array_equal(a, -a.T) and not np.diag(a).any():
        return ALTERNATING
    raise UsageError("matrix is neither symmetric nor alternating")


def _dist(text: str | None) -> EntryDistribution | None:
    if text is None or text == "uniform":
        return None
    try:
        return EntryDistribution.parse(text)
    except (CoklabError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _primes(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad prime list {text!r}") from None


def _emit(report: dict, out: str | None, csv_text: str | None = None) -> None:
    body = json.dumps(report, sort_keys=True, indent=2, default=str)
    print(body)
    if out:
        Path(out).with_suffix(".json").write_text(body + "\n")
        if csv_text is not None:
            Path(out).with_suffix(".csv").write_text(csv_text)


def _envelope(command: str, args, **payload) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "out", "threads")}
    return {"command": command, "version": version(), "parameters": params, **payload}


# ---------------------------------------------------------------- commands


def cmd_cokernel(args) -> int:
    a, kind, modulus = _matrix_arg(args)
    kind = _kind_of(a, args.kind or kind)
    q = _modulus_arg(args, modulus)
    m = ModMatrix(a, q, kind)
    key = quasi_class(m)
    parts = key.parts if hasattr(key, "parts") else (key,)
    out = {"key": str(key), "determinate": key.determinate, "parts": []}
    for part in parts:
        entry = {"p": part.p, "key": str(part), "lambda": list(part.lam)}
        if kind == ALTERNATING:
            f = factorize(q)
            sub = ModMatrix(a, f.factors[[x.p for x in f.factors].index(part.p)].q, ALTERNATING)
            h, zeros = alt_type(sub)
            entry["H"] = list(h.lam)
            entry["residual_corank"] = zeros
        elif part.determinate:
            entry["gram"] = [list(r) for r in key_gram(part).c]
        out["parts"].append(entry)
    _emit(_envelope("cokernel", args, result=out), args.out)
    if not key.determinate:
        print("indeterminate: a cokernel part reaches the modulus exponent", file=sys.stderr)
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    kind = KINDS.get(args.kind)
    if kind is None:
        raise UsageError(f"unknown kind {args.kind!r}")
    primes = _primes(args.primes)
    d = _dist(args.dist)
    if d is None:
        raise UsageError("simulate needs an entry distribution")
    cap = GroupType((args.depth_cap,))
    modulus = int(modulus_for({p: cap for p in primes}, primes, kind).a)
    sim = exposure.simulate(kind, args.n, d, modulus, args.samples, args.seed)
    ref = exposure.product_reference(kind, modulus, args.n, args.k_max)
    det_emp, det_ref = exposure.determinate_part(sim.table), exposure.determinate_part(ref)
    trivial = "|".join(f"{p}:():{'S' if kind == SYMMETRIC else 'A'}{'' if kind == SYMMETRIC else '%02x' % (args.n % 2)}" for p in primes)
    coranks = {}
    for p in primes:
        ref_c = exposure.corank_reference(kind, p, args.n)
        coranks[str(p)] = {"empirical": sim.coranks[p].to_dict(), "reference": ref_c, "distance": exposure.corank_distance(sim.coranks[p], ref_c)}
    report = _envelope(
        "simulate",
        args,
        modulus=modulus,
        empirical=sim.to_dict(),
        reference=ref.to_dict(),
        distance=exposure.l_distance(det_emp, det_ref),
        undetermined_mass={"empirical": 1 - sum(det_emp.values()), "reference": 1 - sum(det_ref.values())},
        trivial={"key": trivial, "empirical": float(sim.table.get(trivial)), "reference": float(ref.get(trivial))},
        coranks=coranks,
    )
    report["runtime_seconds"] = time.perf_counter() - t0
    _emit(report, args.out, sim.table.to_csv())
    return EXIT_OK


def cmd_transition(args) -> int:
    a, kind, modulus = _matrix_arg(args)
    q = _modulus_arg(args, modulus)
    m = ModMatrix(a, q, _kind_of(a, args.kind or kind))
    if args.enumerate:
        table = exposure.enumerate_transition(m, args.budget, args.method)
    else:
        table = exposure.estimate_transition(m, _dist(args.dist), args.samples, args.seed)
    _emit(_envelope("transition", args, result=table.to_dict()), args.out, table.as_distribution().to_csv())
    return EXIT_OK


def cmd_corank_law(args) -> int:
    rep = exposure.corank_walk(args.n, _dist(args.dist), args.p, args.seed, args.runs)
    ref = {"decrease_given_corank_1": 1 - 1 / args.p, "decrease_given_corank_ge_2_floor": 1 - 1 / args.p**2}
    _emit(_envelope("corank-law", args, result=rep.to_dict(), reference=ref), args.out)
    return EXIT_OK


def cmd_joint(args) -> int:
    kind = KINDS.get(args.kind)
    if kind is None:
        raise UsageError(f"unknown kind {args.kind!r}")
    rep = exposure.joint_corners(args.n, args.j, _dist(args.dist), args.modulus, args.samples, args.seed, kind, args.k_max)
    _emit(_envelope("joint-corners", args, result=rep.to_dict()), args.out, rep.empirical.to_csv())
    return EXIT_OK


def _audit_matrix(args) -> np.ndarray:
    if args.matrix in ("identity", "zero"):
        n = args.n
        return np.eye(n, dtype=np.int64) if args.matrix == "identity" else np.zeros((n, n), dtype=np.int64)
    if args.matrix:
        return _matrix_arg(args)[0]
    d = _dist(args.dist) or EntryDistribution.bernoulli(0.5)
    alt = args.event in ("A1", "A2")
    return (sample_alt if alt else sample_sym)(args.n, d, args.seed)


def cmd_audit(args) -> int:
    a = _audit_matrix(args)
    params = audit.AuditParams(args.window_start, args.beta, args.gamma, args.corank_exponent, args.comb_weight)
    ev = args.event
    if ev in ("S1", "A1"):
        rep = audit.check_corank_event(a, args.p, args.corank_exponent, ev)
    elif ev == "S1p":
        rep = audit.check_corank_event(a, 2, 0.25, ev)
    elif ev in ("S2", "A2"):
        mode = audit.SYM_WINDOW if ev == "S2" else audit.ALT_ALL
        rep = audit.check_orthogonality_event(a, args.p, params, mode, not args.search, args.w_max)
    elif ev == "S2p":
        rep = audit.check_sdagger(a, params)
    else:
        raise UsageError(f"unknown event {ev!r}")
    result = rep.to_dict()
    if rep.verdict == audit.VIOLATED:
        result["witness_revalidated"] = audit.revalidate(rep, a)
    _emit(_envelope("audit", args, result=result), args.out)
    return EXIT_OK


_CYCLIC = re.compile(r"^Z/(\d+)(?:\^(\d+))?$")


def _parse_group(text: str) -> list[int]:
    """Cyclic orders from ``Z/9xZ/3``, ``Z/3+Z/3``, ``Z/3^2`` or ``1``."""
    if text.strip() in ("1", "0", "trivial", ""):
        return []
    orders = []
    for chunk in re.split(r"[x+*]", text.replace(" ", "")):
        m = _CYCLIC.match(chunk)
        if not m:
            raise UsageError(f"cannot parse group factor {chunk!r}")
        orders += [int(m.group(1))] * int(m.group(2) or 1)
    return orders


def cmd_limits(args) -> int:
    primes = _primes(args.primes)
    orders = _parse_group(args.group)
    lam: dict[int, list[int]] = {p: [] for p in primes}
    for o in orders:
        f = factorize(o)
        if len(f.factors) != 1 or f.factors[0].p not in lam:
            raise UsageError(f"cyclic order {o} is not a power of a prime in {primes}")
        lam[f.factors[0].p].append(f.factors[0].e)
    if args.setting == "symmetric":
        pairing = _primes(args.pairing) if args.pairing else None
        if pairing is None or len(pairing) != len(orders):
            raise UsageError("--pairing needs one diagonal entry per cyclic factor")
        aut = 1
        order = math.prod(orders) if orders else 1
        by_p: dict[int, list[tuple[int, int]]] = {p: [] for p in primes}
        for o, c in zip(orders, pairing):
            f = factorize(o).factors[0]
            by_p[f.p].append((f.e, c))
        grams = {}
        for p, parts in by_p.items():
            parts.sort(key=lambda t: -t[0])
            exps = tuple(e for e, _ in parts)
            c = [[parts[i][1] if i == j else 0 for j in range(len(parts))] for i in range(len(parts))]
            g = PairingGram(p, exps, tuple(map(tuple, c)))
            grams[str(p)] = [list(r) for r in g.c]
            aut *= aut_count_paired(g) if exps else 1
        mu = mu_inf_sym(primes=primes, aut_order=aut, group_order=order)
        tail = mu * sum(product_sym(p)[1] / product_sym(p)[0] for p in primes)
        nu = {str(p): nu_inf_sym(p, len(lam[p])) for p in primes}
        result = {"mu_inf": mu, "tail_bound": tail, "aut": aut, "group_order": order, "gram": grams, "nu_inf_corank": nu}
    else:
        hp = {p: tuple(v) for p, v in lam.items()}
        sp = {str(p): sp_count(hp[p], p) for p in primes}
        result = {
            "H": {str(p): list(v) for p, v in hp.items()},
            "sp": sp,
            "mu_inf_even": mu_inf_alt_even(hp, primes),
            "mu_inf_odd": mu_inf_alt_odd(hp, primes),
            "tail_bound": sum(product_sym(p)[1] + product_alt_odd(p)[1] for p in primes),
            "nu_inf_corank_even": {str(p): nu_inf_alt_even(p, len(hp[p])) for p in primes},
            "nu_inf_corank_odd": {str(p): nu_inf_alt_odd(p, len(hp[p])) for p in primes},
        }
    _emit(_envelope("limits", args, result=result), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    checked, failures = 0, 0
    for n in range(1, args.inverse_n + 1):
        c, f = audit.inverse_diagonal_check(n)
        checked, failures = checked + c, failures + f
    result = {
        "char_bound": audit.char_suite(args.samples, args.seed),
        "entropy": audit.entropy_identities(),
        "hamming": audit.hamming_grid(n_max=args.hamming_n),
        "inverse_diagonal": {"checked": checked, "failures": failures},
    }
    _emit(_envelope("bounds", args, result=result), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coklab", description="Cokernels of random symmetric and alternating matrices.")
    parser.add_argument("--version", action="version", version=f"coklab {version()}")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    parser.add_argument("--config", default=None, help="JSON file whose keys act as flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", default=None, help="write <out>.json (and <out>.csv where applicable)")
        return p

    def matrix_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--matrix", required=True, help="JSON matrix, object with entries, or a path")
        p.add_argument("--kind", default=None, choices=sorted(KINDS))
        p.add_argument("--prime", type=int, default=None)
        p.add_argument("--exp", type=int, default=None)
        p.add_argument("--modulus", type=int, default=None)

    p = add("cokernel", cmd_cokernel, "class key, group type and pairing of one matrix")
    matrix_flags(p)

    p = add("simulate", cmd_simulate, "empirical class law against the limit")
    p.add_argument("--kind", default="sym", choices=sorted(KINDS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", default="bernoulli:0.5")
    p.add_argument("--primes", default="3")
    p.add_argument("--depth-cap", type=int, default=1)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int, default=3)

    p = add("transition", cmd_transition, "one-step transition table")
    matrix_flags(p)
    p.add_argument("--enumerate", action="store_true", help="exact enumeration instead of sampling")
    p.add_argument("--method", default="exhaustive", choices=["exhaustive", "reduced"])
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)

    p = add("corank-law", cmd_corank_law, "corank walk along the exposure process")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = add("joint-corners", cmd_joint, "joint law of the outermost corners")
    p.add_argument("--kind", default="sym", choices=sorted(KINDS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--dist", default="bernoulli:0.5")
    p.add_argument("--modulus", type=int, default=3)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int, default=3)

    p = add("audit", cmd_audit, "non-sparsity event checks")
    p.add_argument("--event", required=True, choices=["S1", "S2", "A1", "A2", "S1p", "S2p"])
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--matrix", default=None, help="JSON matrix, 'identity' or 'zero'; default samples one")
    p.add_argument("--kind", default=None, choices=sorted(KINDS))
    p.add_argument("--dist", default="bernoulli:0.5")
    p.add_argument("--seed", type=int, default=0)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", default=True)
    mode.add_argument("--search", action="store_true")
    p.add_argument("--w-max", type=int, default=3)
    defaults = audit.AuditParams()
    p.add_argument("--window-start", type=float, default=defaults.window_start)
    p.add_argument("--beta", type=float, default=defaults.beta)
    p.add_argument("--gamma", type=float, default=defaults.gamma)
    p.add_argument("--corank-exponent", type=float, default=defaults.corank_exponent)
    p.add_argument("--comb-weight", type=float, default=None)

    p = add("limits", cmd_limits, "reference values for a named group")
    p.add_argument("--group", required=True, help="e.g. Z/3, Z/9xZ/3, 1")
    p.add_argument("--pairing", default=None, help="diagonal pairing entries, comma separated")
    p.add_argument("--primes", default="3")
    p.add_argument("--setting", default="symmetric", choices=["symmetric", "alternating"])

    p = add("bounds", cmd_bounds, "character-sum, entropy and Hamming-ball suites")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hamming-n", type=int, default=30)
    p.add_argument("--inverse-n", type=int, default=4)
    return parser


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = _load_json(known.config)
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        # config values act as defaults, so flags they supply stop being required
        for sub in parser._subparsers._group_actions[0].choices.values():
            for action in sub._actions:
                if action.dest in cfg:
                    action.required = False
            sub.set_defaults(**{k: v for k, v in cfg.items() if any(a.dest == k for a in sub._actions)})
    return parser.parse_args(argv)


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _set_threads(args.threads)
        return args.func(args)
    except (Indeterminate, InsufficientPrecision) as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, CoklabError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
