"""Command-line front end.

Subcommands:

    mlk bound <file>                 height lower bounds from period data
    mlk rho <file>                   injectivity diameters and clamped minima
    mlk verify <file | --random N>   invariant suites (--suite lattice|
                                     integrals|chain|oracle|all)

Input is a strict JSON document; unknown fields are rejected. Reports go to
stdout, diagnostics to stderr. Exit codes: 0 success, 1 a verify check
failed, 2 parse error, 3 invalid matrix data. MLK_THREADS caps internal
per-embedding parallelism.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .bounds import (
    BoundsError,
    CheckEntry,
    EmbeddingSet,
    height_lower_bound,
    height_term,
    verify_chain,
)
from .lattice import (
    GramMatrix,
    LatticeError,
    bezout_deep_point,
    closest_vector,
    mu_interval,
    shortest_vector,
)
from .oracle import faltings_height_ec, log_abs_delta
from .quadrature import SCHEME_QMC_SHIFTED, SCHEME_TENSOR_GAUSS, integral_ln_f, integral_psi_sq
from .siegel import SiegelError, injectivity_diameter, lambda_clamped, validate_period_matrix

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_INVALID = 3

_SUITES = ("lattice", "integrals", "chain", "oracle", "all")


class InputError(ValueError):
    """Malformed document (exit 2)."""


class DataError(ValueError):
    """Structurally valid document with invalid matrix data (exit 3)."""


def _expect_keys(obj: dict, allowed: set, label: str):
    unknown = set(obj) - allowed
    if unknown:
        raise InputError(f"{label}: unknown fields {sorted(unknown)}")


def _as_matrix(value, g: int, label: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{label}: not a numeric array") from exc
    if arr.ndim == 1:
        if arr.size != g * g:
            raise InputError(f"{label}: flat row-major array must have g*g={g * g} entries")
        arr = arr.reshape(g, g)
    if arr.shape != (g, g):
        raise InputError(f"{label}: expected a {g}x{g} matrix")
    return arr


def _parse_document(raw: bytes):
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("top-level document must be an object")
    _expect_keys(doc, {"g", "degree", "embeddings", "options"}, "document")
    g = doc.get("g")
    if not isinstance(g, int) or g < 1:
        raise InputError("field 'g' must be a positive integer")
    embeddings = doc.get("embeddings")
    if not isinstance(embeddings, list) or not embeddings:
        raise InputError("field 'embeddings' must be a non-empty list")
    degree = doc.get("degree", len(embeddings))
    if not isinstance(degree, int) or degree < 1:
        raise InputError("field 'degree' must be a positive integer")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise InputError("field 'options' must be an object")
    _expect_keys(options, {"epsilon", "budget", "scheme"}, "options")
    epsilon = options.get("epsilon", 0.5)
    if not isinstance(epsilon, (int, float)) or not 0.0 < float(epsilon) < 1.0:
        raise InputError("options.epsilon must lie in (0, 1)")
    budget = options.get("budget")
    if budget is not None and (not isinstance(budget, int) or budget < 1):
        raise InputError("options.budget must be a positive integer")
    scheme = options.get("scheme", SCHEME_QMC_SHIFTED)
    if scheme not in (SCHEME_QMC_SHIFTED, SCHEME_TENSOR_GAUSS):
        raise InputError(f"options.scheme must be one of {SCHEME_QMC_SHIFTED!r}, {SCHEME_TENSOR_GAUSS!r}")

    periods = []
    for i, emb in enumerate(embeddings):
        if not isinstance(emb, dict):
            raise InputError(f"embedding {i}: must be an object")
        _expect_keys(emb, {"re", "im"}, f"embedding {i}")
        if "re" not in emb or "im" not in emb:
            raise InputError(f"embedding {i}: fields 're' and 'im' are required")
        re = _as_matrix(emb["re"], g, f"embedding {i}: 're'")
        im = _as_matrix(emb["im"], g, f"embedding {i}: 'im'")
        try:
            periods.append(validate_period_matrix(re, im))
        except (SiegelError, LatticeError) as exc:
            raise DataError(f"embedding {i}: {exc}") from exc
    if len(periods) > degree:
        raise DataError(f"{len(periods)} embeddings exceed degree {degree}")
    return {
        "g": g,
        "degree": degree,
        "periods": periods,
        "epsilon": float(epsilon),
        "budget": budget,
        "scheme": scheme,
    }


def _read_input(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    parsed = _parse_document(raw)
    parsed["digest"] = "sha256:" + hashlib.sha256(raw).hexdigest()
    return parsed


def _tool_header(digest: str) -> dict:
    return {"tool": {"name": "mlk", "version": __version__}, "input_digest": digest}


def _check_dict(e: CheckEntry) -> dict:
    return {
        "name": e.name,
        "lhs": e.lhs,
        "rhs": e.rhs,
        "slack": e.slack,
        "tolerance": e.tolerance,
        "pass": e.passed,
    }


def _emit(doc: dict):
    for value in _walk_numbers(doc):
        if not math.isfinite(value):
            raise RuntimeError("report contains a non-finite number")
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _walk_numbers(obj):
    if isinstance(obj, float):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _walk_numbers(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from _walk_numbers(v)


def _embedding_set(parsed) -> EmbeddingSet:
    try:
        return EmbeddingSet(parsed["g"], parsed["degree"], parsed["periods"])
    except BoundsError as exc:
        raise DataError(str(exc)) from exc


def cmd_bound(args) -> int:
    parsed = _read_input(args.input)
    if args.epsilon is not None:
        parsed["epsilon"] = args.epsilon
    E = _embedding_set(parsed)
    try:
        report = height_lower_bound(E, epsilon=parsed["epsilon"])
    except BoundsError as exc:
        raise DataError(str(exc)) from exc
    doc = _tool_header(parsed["digest"])
    doc.update(
        {
            "command": "bound",
            "g": E.g,
            "degree": E.degree,
            "epsilon": report.epsilon,
            "kappa": report.kappa,
            "per_embedding": [
                {"rho": t.rho, "rho_clamped": t.rho_clamped, "term": t.term}
                for t in report.per_embedding
            ],
            "height_lower_bound": report.total,
            "simplified_lower_bound": report.weak_total,
            "notes": {"clamp_count": report.clamp_count},
        }
    )
    _emit(doc)
    return EXIT_OK


def cmd_rho(args) -> int:
    parsed = _read_input(args.input)
    per = []
    for om in parsed["periods"]:
        info = lambda_clamped(om)
        per.append(
            {
                "rho": injectivity_diameter(om),
                "rho_clamped": info.rho_clamped,
                "lambda": info.lam,
                "lambda_matches_rho": info.agrees,
            }
        )
    doc = _tool_header(parsed["digest"])
    doc.update({"command": "rho", "g": parsed["g"], "degree": parsed["degree"], "per_embedding": per})
    _emit(doc)
    return EXIT_OK


def _random_spd(rng: np.random.Generator, g: int) -> GramMatrix:
    lam = np.exp(rng.uniform(-1.5, 1.5, g))  # condition number <= e^3 < 1e3
    Q = np.linalg.qr(rng.normal(size=(g, g)))[0]
    Y = (Q * lam) @ Q.T
    return GramMatrix((Y + Y.T) / 2.0)


def _suite_lattice(n: int, seed: int, g: int) -> list[CheckEntry]:
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(n):
        Y = _random_spd(rng, g)
        deep = bezout_deep_point(Y)
        lam_dual = shortest_vector(Y.inverse()).value
        psi = closest_vector(Y, deep.x).value
        prod = 2.0 * psi * lam_dual
        entries.append(
            CheckEntry(
                name=f"deep_point_certificate[{i}]",
                lhs=prod,
                rhs=1.0,
                slack=prod - 1.0,
                tolerance=1e-9,
                passed=prod >= 1.0 - 1e-9,
            )
        )
        iv = mu_interval(Y, budget=128)
        prod2 = 2.0 * iv.lo * lam_dual
        entries.append(
            CheckEntry(
                name=f"covering_product[{i}]",
                lhs=prod2,
                rhs=1.0,
                slack=prod2 - 1.0,
                tolerance=1e-10,
                passed=prod2 >= 1.0 - 1e-10,
            )
        )
        entries.append(
            CheckEntry(
                name=f"enclosure[{i}]",
                lhs=iv.hi,
                rhs=iv.lo,
                slack=iv.hi - iv.lo,
                tolerance=0.0,
                passed=iv.hi >= iv.lo,
            )
        )
    return entries


def _suite_integrals(n: int, seed: int, g: int, budget: int | None) -> list[CheckEntry]:
    rng = np.random.default_rng(seed)
    g = min(g, 3)
    entries = []
    for i in range(n):
        Y = _random_spd(rng, g)
        scheme = SCHEME_TENSOR_GAUSS if g <= 2 else SCHEME_QMC_SHIFTED
        small = budget or (64 if scheme == SCHEME_TENSOR_GAUSS else 4096)
        r = integral_psi_sq(Y, scheme, small, seed)
        lo = mu_interval(Y, budget=128).lo
        slack = r.value + r.error_estimate - lo * lo / 3.0
        entries.append(
            CheckEntry(
                name=f"second_moment[{i}]",
                lhs=r.value + r.error_estimate,
                rhs=lo * lo / 3.0,
                slack=slack,
                tolerance=1e-9,
                passed=slack >= -1e-9,
                error_estimate=r.error_estimate,
            )
        )
        for t in (0.5, 1.0, 2.0):
            r = integral_ln_f(Y, t, scheme, small, seed)
            rhs = -(g / 2.0) * math.log(t)
            slack = rhs - (r.value - r.error_estimate)
            entries.append(
                CheckEntry(
                    name=f"log_mean_bound[{i},t={t}]",
                    lhs=r.value - r.error_estimate,
                    rhs=rhs,
                    slack=slack,
                    tolerance=1e-9,
                    passed=slack >= -1e-9,
                    error_estimate=r.error_estimate,
                )
            )
    return entries


def _suite_chain(parsed, seed: int) -> list[CheckEntry]:
    E = EmbeddingSet(parsed["g"], parsed["degree"], parsed["periods"])
    report = verify_chain(E, scheme=parsed["scheme"], budget=parsed["budget"], seed=seed)
    return list(report.entries)


def _suite_oracle(seed: int) -> list[CheckEntry]:
    entries = []
    for y in (1.0, 2.0, 5.0, 10.0, 50.0):
        ht = faltings_height_ec(complex(0.0, y))
        term = height_term(1.0 / math.sqrt(y), 1)
        gap = ht - term
        entries.append(
            CheckEntry(
                name=f"height_gap[y={y:g}]",
                lhs=gap,
                rhs=0.0,
                slack=gap,
                tolerance=1e-9,
                passed=0.0 <= gap <= 1.0,
            )
        )
    rng = np.random.default_rng(seed)
    for i in range(20):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))
        a, b = 1, rng.integers(-5, 6)
        # tau -> tau + b then inversion: both leave |Delta| (Im)^6 fixed
        t2 = -1.0 / (tau + b)
        lhs = log_abs_delta(tau) + 6.0 * math.log(tau.imag)
        rhs = log_abs_delta(t2) + 6.0 * math.log(t2.imag)
        diff = abs(lhs - rhs)
        entries.append(
            CheckEntry(
                name=f"weight12_invariance[{i}]",
                lhs=lhs,
                rhs=rhs,
                slack=-diff,
                tolerance=1e-9,
                passed=diff <= 1e-9,
            )
        )
    return entries


def _default_chain_input():
    return {
        "g": 1,
        "degree": 1,
        "periods": [validate_period_matrix([[0.0]], [[1.0]])],
        "epsilon": 0.5,
        "budget": None,
        "scheme": SCHEME_QMC_SHIFTED,
        "digest": "sha256:" + hashlib.sha256(b"builtin:tau=i").hexdigest(),
    }


def cmd_verify(args) -> int:
    if args.input is not None:
        parsed = _read_input(args.input)
    elif args.suite in ("chain", "all"):
        parsed = _default_chain_input()
    else:
        parsed = {"digest": "sha256:" + hashlib.sha256(b"builtin:random").hexdigest()}
    if args.budget is not None:
        parsed["budget"] = args.budget

    n = args.random if args.random is not None else 50
    entries: list[CheckEntry] = []
    if args.suite in ("lattice", "all"):
        entries += _suite_lattice(n, args.seed, args.dim)
    if args.suite in ("integrals", "all"):
        entries += _suite_integrals(max(1, n // 10), args.seed, min(args.dim, 2), args.budget)
    if args.suite in ("chain", "all"):
        entries += _suite_chain(parsed, args.seed)
    if args.suite in ("oracle", "all"):
        entries += _suite_oracle(args.seed)

    all_passed = all(e.passed for e in entries)
    doc = _tool_header(parsed["digest"])
    doc.update(
        {
            "command": "verify",
            "suite": args.suite,
            "seed": args.seed,
            "checks": [_check_dict(e) for e in entries],
            "all_passed": all_passed,
        }
    )
    _emit(doc)
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mlk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="height lower bounds from a period-data file")
    p_bound.add_argument("input")
    p_bound.add_argument("--epsilon", type=float, default=None,
                         help="epsilon for the simplified bound (default: from file or 0.5)")
    p_bound.set_defaults(func=cmd_bound)

    p_rho = sub.add_parser("rho", help="injectivity diameters and clamped minima")
    p_rho.add_argument("input")
    p_rho.set_defaults(func=cmd_rho)

    p_verify = sub.add_parser("verify", help="run an invariant suite")
    p_verify.add_argument("input", nargs="?", default=None)
    p_verify.add_argument("--suite", choices=_SUITES, default="all")
    p_verify.add_argument("--random", type=int, default=None, metavar="N",
                          help="number of random matrices for the lattice/integrals suites")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--dim", type=int, default=3)
    p_verify.add_argument("--budget", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DataError, BoundsError, SiegelError, LatticeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
