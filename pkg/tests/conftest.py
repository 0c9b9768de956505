import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mlk.lattice import GramMatrix

settings.register_profile(
    "mlk",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("mlk")


def make_spd(rng: np.random.Generator, g: int, cond_max: float = 1e3,
             scale: float = 1.0) -> GramMatrix:
    """Random SPD Gram matrix with condition number <= cond_max."""
    half = 0.5 * np.log(cond_max)
    lam = scale * np.exp(rng.uniform(-half, half, g))
    Q = np.linalg.qr(rng.normal(size=(g, g)))[0]
    Y = (Q * lam) @ Q.T
    return GramMatrix((Y + Y.T) / 2.0)


def make_reduced_period(rng: np.random.Generator, g: int):
    """Random period matrix whose flags are guaranteed satisfied.

    Eigenvalues of Y at least 1 force lambda_1(Y)^2 >= 1 > sqrt(3)/2; for
    g = 1 the imaginary part >= 1 puts tau in the fundamental domain.
    """
    from mlk.siegel import reduce as siegel_reduce, validate_period_matrix

    lam = rng.uniform(1.0, 3.0, g)
    Q = np.linalg.qr(rng.normal(size=(g, g)))[0]
    Y = (Q * lam) @ Q.T
    Y = (Y + Y.T) / 2.0
    X = rng.uniform(-0.5, 0.5, (g, g))
    X = (X + X.T) / 2.0
    return siegel_reduce(validate_period_matrix(X, Y))


def make_lll_gram(rng: np.random.Generator, g: int, lo: float = 0.5,
                  hi: float = 3.0) -> GramMatrix:
    """Random SPD matrix replaced by its LLL-reduced congruent representative."""
    from mlk.lattice import lll_reduce

    lam = rng.uniform(lo, hi, g)
    Q = np.linalg.qr(rng.normal(size=(g, g)))[0]
    Y = (Q * lam) @ Q.T
    Y = GramMatrix((Y + Y.T) / 2.0)
    _, U = lll_reduce(Y.chol.T)
    Uf = U.astype(float)
    Yr = Uf.T @ Y.entries @ Uf
    return GramMatrix((Yr + Yr.T) / 2.0)


def brute_shortest(Y: GramMatrix, box: int = 10) -> float:
    """Independent SVP oracle: exhaustive scan over the sup-norm box."""
    rng_axis = np.arange(-box, box + 1)
    best = np.inf
    for m in itertools.product(rng_axis, repeat=Y.g):
        if any(m):
            v = np.asarray(m, dtype=float)
            best = min(best, float(v @ Y.entries @ v))
    return float(np.sqrt(best))


def brute_closest(Y: GramMatrix, x, box: int = 5) -> float:
    """Independent CVP oracle: exhaustive scan around round(x)."""
    x = np.asarray(x, dtype=float)
    center = np.round(x).astype(int)
    best = np.inf
    for off in itertools.product(range(-box, box + 1), repeat=Y.g):
        v = x - (center + np.asarray(off))
        best = min(best, float(v @ Y.entries @ v))
    return float(np.sqrt(best))


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
