"""Elliptic-curve (g = 1) Faltings height via the modular discriminant.

For a complex torus C/(Z + tau Z) with potentially good reduction
everywhere, the stable Faltings height is archimedean and has the closed
form

    h(tau) = -(1/12) ln( (2 pi)^12 |Delta(tau)| (Im tau)^6 ),

with the convention Delta(tau) = q prod_{n>=1} (1 - q^n)^24, q = e^{2 pi i
tau} (the (2 pi)^12 factor is explicit in h, not folded into Delta; the
invariance and asymptotic tests pin this convention down behaviorally).
|Delta(tau)| (Im tau)^6 is modular invariant, so h is well defined on the
tau orbit. This gives an independent end-to-end check of the lattice-based
height bound and of its asymptotic sharpness along tau = iy.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = ["OracleError", "log_abs_delta", "delta_modular", "faltings_height_ec"]

_TERM_CAP = 10_000_000


class OracleError(ValueError):
    """tau outside the upper half plane, or an uncertifiable truncation."""


def _validate_tau(tau) -> complex:
    t = complex(tau)
    if not (math.isfinite(t.real) and math.isfinite(t.imag)):
        raise OracleError("tau must be finite")
    if t.imag <= 0.0:
        raise OracleError("tau must have positive imaginary part")
    return t


def log_abs_delta(tau, tol: float = 1e-12) -> float:
    """ln |Delta(tau)|, stable for arbitrarily large Im tau.

    The product tail is certified by the geometric bound
    sum_{n > N} |ln|1 - q^n|| <= |q|^{N+1} / (1 - |q|)^2, truncated once 24x
    that is <= tol (an absolute bound on the log equals a relative bound on
    Delta itself).
    """
    if tol <= 0.0:
        raise OracleError("tol must be positive")
    t = _validate_tau(tau)
    base = -2.0 * math.pi * t.imag  # ln |q|
    aq = math.exp(base) if base > -745.0 else 0.0
    if aq == 0.0:
        return base
    n_terms = int(math.ceil((math.log(tol) + 2.0 * math.log1p(-aq) - math.log(24.0)) / base))
    n_terms = max(n_terms, 1)
    if n_terms > _TERM_CAP:
        raise OracleError("tau too close to the real axis to certify the product")
    q = cmath.exp(2j * math.pi * t)
    total = 0.0
    for start in range(1, n_terms + 1, 1_000_000):
        n = np.arange(start, min(start + 1_000_000, n_terms + 1))
        total += float(np.sum(np.log(np.abs(1.0 - q**n))))
    return base + 24.0 * total


def delta_modular(tau, tol: float = 1e-12) -> float:
    """|Delta(tau)|. Underflows to 0.0 for Im tau beyond ~113; use
    log_abs_delta for height computations at large imaginary part."""
    ld = log_abs_delta(tau, tol)
    return math.exp(ld) if ld > -745.0 else 0.0


def faltings_height_ec(tau) -> float:
    """Stable Faltings height of C/(Z + tau Z) under potentially good
    reduction; modular invariant in tau."""
    t = _validate_tau(tau)
    return -(12.0 * math.log(2.0 * math.pi) + log_abs_delta(t) + 6.0 * math.log(t.imag)) / 12.0
