"""The grouped-horseshoe distribution: a d-variate scale mixture of normals
with one shared half-Cauchy local scale.

The density has the closed form

    p(x) = K_d * exp(r^2/2) E_((d+1)/2)(r^2/2) / r^(d-1),   r = ||x||,
    K_d  = Gamma((d+1)/2) / sqrt(2 pi^(d+2)),

evaluated through the exponentially scaled exponential integral so the
exp/E product never overflows.  The density has a pole at the origin for
every dimension; ``log_density`` returns +inf there by design.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .config import DEFAULT_CONFIG
from .errors import DimensionError, DomainError
from .quadrature import adaptive_quad
from .rng import make_rng
from .specfun import exp_scaled_gen_exp_integral

__all__ = [
    "GhsDistribution",
    "MixtureDraw",
    "log_density",
    "density",
    "radial_log_density",
    "sample",
    "sample_arrays",
    "density_quadrature_oracle",
    "normalization_integral",
    "origin_ball_mass",
]


@dataclass(frozen=True)
class GhsDistribution:
    """Dimension and scale of a grouped-horseshoe random vector."""

    d: int
    sigma_theta: float = 1.0

    def __post_init__(self):
        if self.d < 1 or self.d != int(self.d):
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        if not self.sigma_theta > 0:
            raise DomainError(f"scale must be positive, got {self.sigma_theta}")


@dataclass(frozen=True)
class MixtureDraw:
    """One draw: the shared local scale and the conditional normal vector."""

    lam: float
    x: np.ndarray


def _log_norm_const(d):
    return sp.gammaln(0.5 * (d + 1)) - 0.5 * (math.log(2.0) + (d + 2) * math.log(math.pi))


def radial_log_density(d, r, sigma_theta=1.0, config=DEFAULT_CONFIG):
    """log density at any point with ||x|| = r (the density is spherical)."""
    if r < 0:
        raise DomainError("radius must be nonnegative")
    r = r / sigma_theta
    if r == 0.0:
        return math.inf
    u = 0.5 * r * r
    val = (
        _log_norm_const(d)
        + math.log(exp_scaled_gen_exp_integral(0.5 * (d + 1), u, config))
        - (d - 1) * math.log(r)
    )
    return float(val - d * math.log(sigma_theta))


def log_density(dist: GhsDistribution, x, config=DEFAULT_CONFIG):
    """log p(x) for a length-d point; +inf at the origin (pole)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (dist.d,):
        raise DimensionError(f"expected a vector of length {dist.d}, got shape {x.shape}")
    return radial_log_density(dist.d, float(np.linalg.norm(x)), dist.sigma_theta, config)


def density(dist: GhsDistribution, x, config=DEFAULT_CONFIG):
    return math.exp(log_density(dist, x, config))


def sample(dist: GhsDistribution, n, seed):
    """Draw n mixture samples: lam ~ half-Cauchy, x | lam ~ N(0, (sigma lam)^2 I).

    The half-Cauchy draw uses the inverse CDF lam = tan(pi U / 2), so runs are
    exactly reproducible for a fixed seed.
    """
    if n < 1:
        raise DomainError("need n >= 1 draws")
    rng = make_rng(seed)
    u = rng.random(n)
    lam = np.abs(np.tan(0.5 * math.pi * u))
    z = rng.standard_normal((n, dist.d))
    xs = dist.sigma_theta * lam[:, None] * z
    return [MixtureDraw(float(l), x) for l, x in zip(lam, xs)]


def sample_arrays(dist: GhsDistribution, n, seed):
    """Like :func:`sample` but returns (lam, x) arrays; used by the CLI."""
    draws = sample(dist, n, seed)
    lam = np.array([d.lam for d in draws])
    xs = np.vstack([d.x for d in draws])
    return lam, xs


def density_quadrature_oracle(d, x, rel_tol=1e-12):
    """Mixture-integral oracle for the standard (unit scale) density.

    Integrates the normal/half-Cauchy mixture after the t = 1/lambda^2
    substitution, independently of the closed form.  Test use only.
    """
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x) if x.ndim == 1 else float(x) ** 2
    if r2 == 0.0:
        raise DomainError("oracle diverges at the origin")
    d = int(d)
    u = 0.5 * r2
    nu = 0.5 * (d + 1)

    # (2 pi)^(-d/2) / pi * int_0^inf t^(nu-1) e^(-t u) / (1+t) dt, w = t u
    def f(w):
        if w <= 0.0:
            return 0.0
        return math.exp((nu - 1.0) * math.log(w) - w) / (u + w)

    cut = 10.0 + 2.0 * nu
    integral = adaptive_quad(f, 0.0, cut, rel_tol=rel_tol) + adaptive_quad(
        f, cut, np.inf, rel_tol=rel_tol
    )
    log_val = (
        -0.5 * d * math.log(2.0 * math.pi)
        - math.log(math.pi)
        + (1.0 - nu) * math.log(u)
        + math.log(integral)
    )
    return math.exp(log_val)


def normalization_integral(d, config=DEFAULT_CONFIG, rel_tol=1e-10):
    """Total mass of the standard density by radial quadrature (should be 1)."""
    d = int(d)
    log_sa = math.log(2.0) + 0.5 * d * math.log(math.pi) - sp.gammaln(0.5 * d)

    def f(r):
        if r <= 0.0:
            return 0.0
        return math.exp(log_sa + (d - 1) * math.log(r) + radial_log_density(d, r, 1.0, config))

    return adaptive_quad(f, 0.0, 2.0, rel_tol=rel_tol) + adaptive_quad(
        f, 2.0, np.inf, rel_tol=rel_tol
    )


def origin_ball_mass(d, radius, config=DEFAULT_CONFIG, rel_tol=1e-11):
    """P(||x|| <= radius) for the standard distribution, by radial quadrature.

    Hyperspherical reduction gives
        mass = [Gamma((d+1)/2) / (pi Gamma(d/2))]
               * int_0^(radius^2/2) u^(-1/2) e^u E_((d+1)/2)(u) du,
    evaluated after u = v^2 to remove the endpoint singularity.
    """
    if radius <= 0:
        raise DomainError("radius must be positive")
    d = int(d)
    nu = 0.5 * (d + 1)
    vmax = radius / math.sqrt(2.0)

    def f(v):
        if v <= 0.0:
            return 0.0
        return 2.0 * exp_scaled_gen_exp_integral(nu, v * v, config)

    lead = math.exp(sp.gammaln(nu) - math.log(math.pi) - sp.gammaln(0.5 * d))
    if vmax <= 2.0:
        integral = adaptive_quad(f, 0.0, vmax, rel_tol=rel_tol)
    else:
        integral = adaptive_quad(f, 0.0, 2.0, rel_tol=rel_tol) + adaptive_quad(
            f, 2.0, vmax, rel_tol=rel_tol
        )
    return lead * integral
