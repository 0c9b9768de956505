"""mlk: certified geometry-of-numbers computations and effective height bounds.

The package computes, from the period matrices of a principally polarized
abelian variety, an effective lower bound on its stable Faltings height, and
numerically verifies every inequality the bound rests on: the Bezout
deep-point certificate for the covering radius, second-moment and
log-Gaussian integral estimates, theta-function normalizations, and the
clamped agreement between the dual first minimum and the injectivity
diameter.
"""

__version__ = "0.1.0"

from .lattice import (
    GramMatrix,
    IntervalEstimate,
    LatticeError,
    bezout_deep_point,
    closest_vector,
    mu_interval,
    norm,
    shortest_vector,
)
from .theta import ThetaValue, cube_norm_s, f_series, theta_siegel
from .quadrature import QuadratureResult, integral_ln_f, integral_psi_sq, integrate_cube
from .siegel import (
    PeriodMatrix,
    injectivity_diameter,
    lambda_clamped,
    reduce,
    riemann_form_norm,
    validate_period_matrix,
)
from .bounds import (
    BoundReport,
    EmbeddingSet,
    archimedean_invariant,
    height_from_theta_invariants,
    height_lower_bound,
    height_term,
    kappa,
    log_gaussian_bound,
    verify_chain,
    weakened_height_bound,
)
from .oracle import delta_modular, faltings_height_ec, log_abs_delta

__all__ = [
    "__version__",
    "GramMatrix",
    "IntervalEstimate",
    "LatticeError",
    "norm",
    "shortest_vector",
    "closest_vector",
    "bezout_deep_point",
    "mu_interval",
    "ThetaValue",
    "f_series",
    "theta_siegel",
    "cube_norm_s",
    "QuadratureResult",
    "integrate_cube",
    "integral_psi_sq",
    "integral_ln_f",
    "PeriodMatrix",
    "validate_period_matrix",
    "reduce",
    "riemann_form_norm",
    "injectivity_diameter",
    "lambda_clamped",
    "EmbeddingSet",
    "BoundReport",
    "kappa",
    "height_term",
    "height_lower_bound",
    "weakened_height_bound",
    "log_gaussian_bound",
    "archimedean_invariant",
    "height_from_theta_invariants",
    "verify_chain",
    "delta_modular",
    "log_abs_delta",
    "faltings_height_ec",
]
