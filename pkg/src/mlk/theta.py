"""Gaussian lattice sums and theta functions with certified truncation.

Three closely related series are evaluated:

* f_Y(t; x) = sqrt(det Y) * sum_m exp(-pi t ||x - m||_Y^2),
* theta_Omega(z) = sum_n exp(i pi n^T Omega n + 2 i pi n^T z),
* the cube-metric section norm
  ||s||(z) = det(Y)^{1/4} exp(-pi y^T Y^{-1} y) |theta_Omega(z)|,  y = Im z.

Each sum is truncated to a box that covers the ellipsoid ||. ||_Y <= R
around the Gaussian center, with the omitted mass bounded rigorously: balls
of radius lambda_1(Y)/2 around lattice points are disjoint, so the tail sum
is dominated by a continuous Gaussian integral over the outside of the
ellipsoid, an explicit incomplete-gamma expression. theta evaluation
recenters at the Gaussian peak c = Y^{-1} Im z so term counts stay small
for large imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.special import gammaincc

from .lattice import GramMatrix, _int_box
from .siegel import PeriodMatrix

__all__ = [
    "ThetaError",
    "ThetaValue",
    "f_series",
    "f_series_batch",
    "theta_siegel",
    "cube_norm_s",
    "cube_norm_batch",
]

_EXP_CAP = 700.0    # |log| cap before exp() under/overflows
_CHUNK = 1 << 22    # max points x terms entries per vectorized block
_DENORMAL = 5e-324


class ThetaError(ValueError):
    """Invalid series argument, or a truncation that cannot be certified."""


@dataclass(frozen=True)
class ThetaValue:
    """A truncated series value with a certified absolute tail bound."""

    value: complex
    tail_bound: float
    terms_used: int


def _tail_bound(g: int, det_sqrt: float, lam1: float, t: float, radius: float) -> float:
    """Upper bound on det_sqrt * sum over ||x - m||_Y > radius of
    exp(-pi t ||x - m||_Y^2), uniform in x.

    Disjoint dual balls of radius lam1/2 turn the lattice tail into a
    continuous radial integral; the binomial expansion of (rho + lam1/2)^(g-1)
    reduces it to upper incomplete gamma functions.
    """
    a = radius - lam1
    if a <= 0.0:
        return math.inf
    c = math.pi * t
    total = 0.0
    for j in range(g):
        s = (j + 1) / 2.0
        part = 0.5 * c ** (-s) * math.gamma(s) * float(gammaincc(s, c * a * a))
        total += math.comb(g - 1, j) * (lam1 / 2.0) ** (g - 1 - j) * part
    return det_sqrt * g * (2.0 / lam1) ** g * total


def _radius_for(g, det_sqrt, lam1, t, target, r_init) -> float:
    r = max(r_init, 1.5 * lam1)
    for _ in range(500):
        if _tail_bound(g, det_sqrt, lam1, t, r) <= target:
            return r
        r *= 1.15
    raise ThetaError("tolerance unreachable before the enumeration cap (pathological Y)")


def f_series_batch(Y: GramMatrix, t: float, points, tol: float = 1e-12):
    """f_Y(t; x) at many x simultaneously.

    Returns ``(values, tail_bound, terms)``: values includes every lattice
    point of a box covering the truncation ellipsoid of each x (a superset,
    so accuracy only improves), and tail_bound is a certified absolute bound
    on the omitted mass, uniform over the batch and at most tol * min value.
    """
    if t <= 0.0:
        raise ThetaError("t must be positive")
    if tol <= 0.0:
        raise ThetaError("tol must be positive")
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.shape[1] != Y.g:
        raise ThetaError(f"points of dimension {P.shape[1]} incompatible with g={Y.g}")
    if not np.all(np.isfinite(P)):
        raise ThetaError("points must be finite")
    P = P - np.floor(P)  # the series is Z^g-periodic
    g, det_sqrt, lam1 = Y.g, Y.det_sqrt, Y.lambda1()
    mu_hi = Y.covering_upper()
    # f >= det_sqrt * exp(-pi t mu^2) everywhere; certify the tail against it.
    target = tol * det_sqrt * math.exp(-min(math.pi * t * mu_hi * mu_hi, _EXP_CAP))
    R = _radius_for(g, det_sqrt, lam1, t, max(target, _DENORMAL), mu_hi * 1.01)
    w = R * np.sqrt(np.diag(Y.inverse().entries))
    cand = _int_box(np.ceil(-w), np.floor(1 + w)).astype(float)
    Yc = cand @ Y.entries
    qm = np.einsum("ij,ij->i", cand, Yc)
    values = np.empty(P.shape[0])
    chunk = max(1, _CHUNK // max(1, cand.shape[0]))
    for k in range(0, P.shape[0], chunk):
        S = P[k : k + chunk]
        G1 = S @ Y.entries
        qx = np.einsum("ij,ij->i", S, G1)
        D = qx[:, None] - 2.0 * (G1 @ cand.T) + qm[None, :]
        np.maximum(D, 0.0, out=D)
        values[k : k + chunk] = np.exp(-math.pi * t * D).sum(axis=1)
    values *= det_sqrt
    return values, _tail_bound(g, det_sqrt, lam1, t, R), cand.shape[0]


def f_series(Y: GramMatrix, t: float, x, tol: float = 1e-12) -> ThetaValue:
    """Gaussian lattice sum f_Y(t; x) with relative truncation error <= tol."""
    values, tail, terms = f_series_batch(Y, t, np.asarray(x, dtype=float).reshape(1, -1), tol)
    return ThetaValue(value=float(values[0]), tail_bound=tail, terms_used=terms)


def _recentered_terms(om: PeriodMatrix, center: np.ndarray, tol_abs: float):
    """Lattice points n with ||n + center||_Y <= R plus their Y-quadratic and
    X-phase data; tail of the recentered Gaussian sum <= tol_abs."""
    Y = om.Y
    g, lam1 = Y.g, Y.lambda1()
    R = _radius_for(g, 1.0, lam1, 1.0, max(tol_abs, _DENORMAL), Y.covering_upper() * 1.01)
    w = R * np.sqrt(np.diag(Y.inverse().entries))
    lows = np.ceil(-center - w)
    highs = np.floor(-center + w)
    cand = _int_box(lows, np.maximum(highs, lows)).astype(float)
    tail = _tail_bound(g, 1.0, lam1, 1.0, R)
    return cand, tail


def theta_siegel(om: PeriodMatrix, z, tol: float = 1e-12) -> ThetaValue:
    """theta_Omega(z), truncated over a shifted ellipsoid around the Gaussian
    center c = Y^{-1} Im z; certified |omitted| <= tol * (|value| + tol)."""
    if tol <= 0.0:
        raise ThetaError("tol must be positive")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != om.g:
        raise ThetaError(f"z of dimension {z.shape[0]} incompatible with g={om.g}")
    if not np.all(np.isfinite(z)):
        raise ThetaError("z must be finite")
    a, b = z.real, z.imag
    c = cho_solve((om.Y.chol, True), b)
    q = float(b @ c)  # b^T Y^{-1} b
    if math.pi * q > _EXP_CAP:
        raise ThetaError("imaginary part of z too large for a stable evaluation")
    target = tol * tol * math.exp(-min(math.pi * q, _EXP_CAP))
    cand, tail = _recentered_terms(om, c, target)
    shifted = cand + c
    quad = np.einsum("ij,ij->i", shifted, shifted @ om.Y.entries)
    phase = np.einsum("ij,ij->i", cand, cand @ om.X) + 2.0 * (cand @ a)
    s = complex(np.sum(np.exp(-math.pi * quad + 1j * math.pi * phase)))
    scale = math.exp(math.pi * q)
    return ThetaValue(value=scale * s, tail_bound=scale * tail, terms_used=cand.shape[0])


def cube_norm_s(om: PeriodMatrix, z, tol: float = 1e-12) -> float:
    """Cube-metric section norm ||s||(z) >= 0.

    Evaluated in the numerically stable recentered form
    det(Y)^{1/4} |sum_n exp(-pi ||n + c||_Y^2 + i phase_n)|, in which the
    exp(-pi y^T Y^{-1} y) prefactor cancels exactly; absolute truncation
    error <= det(Y)^{1/4} * tol^2.
    """
    if tol <= 0.0:
        raise ThetaError("tol must be positive")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != om.g:
        raise ThetaError(f"z of dimension {z.shape[0]} incompatible with g={om.g}")
    if not np.all(np.isfinite(z)):
        raise ThetaError("z must be finite")
    a, b = z.real, z.imag
    c = cho_solve((om.Y.chol, True), b)
    cand, _ = _recentered_terms(om, c, tol * tol)
    shifted = cand + c
    quad = np.einsum("ij,ij->i", shifted, shifted @ om.Y.entries)
    phase = np.einsum("ij,ij->i", cand, cand @ om.X) + 2.0 * (cand @ a)
    s = complex(np.sum(np.exp(-math.pi * quad + 1j * math.pi * phase)))
    return float(om.Y.det_sqrt ** 0.5 * abs(s))


def cube_norm_batch(om: PeriodMatrix, xy, tol: float = 1e-12):
    """||s||(x + Omega y) over many torus coordinates (x, y) in [0,1)^{2g}.

    ``xy`` has shape (N, 2g): the first g columns are x, the last g are y.
    Returns ``(values, err)`` with err a certified absolute truncation bound
    det(Y)^{1/4} * tol, uniform over the batch.
    """
    if tol <= 0.0:
        raise ThetaError("tol must be positive")
    XY = np.asarray(xy, dtype=float)
    if XY.ndim == 1:
        XY = XY.reshape(1, -1)
    g = om.g
    if XY.shape[1] != 2 * g:
        raise ThetaError(f"points of dimension {XY.shape[1]} incompatible with 2g={2 * g}")
    if not np.all(np.isfinite(XY)):
        raise ThetaError("points must be finite")
    xs = XY[:, :g] - np.floor(XY[:, :g])
    ys = XY[:, g:] - np.floor(XY[:, g:])
    Y, X = om.Y, om.X
    lam1 = Y.lambda1()
    R = _radius_for(g, 1.0, lam1, 1.0, max(tol, _DENORMAL), Y.covering_upper() * 1.01)
    w = R * np.sqrt(np.diag(Y.inverse().entries))
    cand = _int_box(np.ceil(-w - 1), np.floor(w)).astype(float)  # covers n = v - y, y in [0,1]
    Yn = cand @ Y.entries
    qn = np.einsum("ij,ij->i", cand, Yn)
    pn = np.einsum("ij,ij->i", cand, cand @ X)
    det4 = Y.det_sqrt ** 0.5
    values = np.empty(XY.shape[0])
    chunk = max(1, _CHUNK // max(1, cand.shape[0]))
    for k in range(0, XY.shape[0], chunk):
        xk, yk = xs[k : k + chunk], ys[k : k + chunk]
        qy = np.einsum("ij,ij->i", yk, yk @ Y.entries)
        quad = qn[None, :] + 2.0 * (yk @ Yn.T) + qy[:, None]
        np.maximum(quad, 0.0, out=quad)
        phase = pn[None, :] + 2.0 * ((xk + yk @ X) @ cand.T)
        total = np.exp(-math.pi * quad + 1j * math.pi * phase).sum(axis=1)
        values[k : k + chunk] = np.abs(total)
    values *= det4
    return values, det4 * _tail_bound(g, 1.0, lam1, 1.0, R)
