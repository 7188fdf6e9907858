"""Risk-bound machinery: prior mass of small KL balls, the information-risk
upper bound, and a Monte Carlo estimate of the cumulative-KL (Cesaro-average)
risk of the Bayes estimator.

For data y_1..y_n ~ N(theta, sigma^2 I_d) with a standard grouped-horseshoe
prior on theta, the KL ball of radius 1/n around the truth theta0 is the
Euclidean ball ||theta - theta0|| <= sigma sqrt(2/n), and

    R_n <= 1/n - (1/n) log P(prior mass of that ball).

At theta0 = 0 the mass reduces to a one-dimensional radial integral; away
from the origin the ball is bracketed between its inscribed and
circumscribed hypercubes (the inscribed/lower value is what the bound rate
argument needs, so it is the reported mass).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .distribution import origin_ball_mass, radial_log_density
from .errors import DomainError, ResourceError
from .quadrature import adaptive_quad
from .rng import make_rng, split_seed

__all__ = [
    "RiskScenario",
    "kl_ball_radius",
    "kl_ball_prior_mass",
    "offcenter_ball_mass_brackets",
    "risk_upper_bound",
    "cesaro_risk_mc",
]


@dataclass(frozen=True)
class RiskScenario:
    """True mean, noise scale and the sample sizes of interest."""

    d: int
    sigma: float = 1.0
    theta0: tuple = ()
    n_grid: tuple = ()

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("dimension must be >= 1")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        t0 = tuple(float(v) for v in self.theta0) or tuple([0.0] * self.d)
        if len(t0) != self.d:
            raise DomainError("theta0 must have length d")
        object.__setattr__(self, "theta0", t0)
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if any(n < 2 for n in self.n_grid):
            raise DomainError("all sample sizes must be >= 2")

    @property
    def centered(self):
        return all(v == 0.0 for v in self.theta0)


def kl_ball_radius(scenario: RiskScenario, n):
    """Euclidean radius of the KL ball of size 1/n."""
    if n < 2:
        raise DomainError("need n >= 2")
    return scenario.sigma * math.sqrt(2.0 / n)


def _cube_mass(theta0, half_side, nodes=24):
    """Prior mass of an axis-aligned cube around theta0, tensor Gauss-Legendre.

    Valid while the cube stays away from the density pole at the origin.
    """
    theta0 = np.asarray(theta0, dtype=float)
    d = theta0.size
    if np.linalg.norm(theta0) <= 2.0 * half_side * math.sqrt(d):
        raise DomainError("cube too close to the origin pole for smooth quadrature")
    nodes_1d, gl_w = np.polynomial.legendre.leggauss(nodes)
    pts_1d = half_side * nodes_1d
    w_1d = half_side * gl_w
    grids = np.meshgrid(*([pts_1d] * d), indexing="ij")
    weights = np.ones_like(grids[0])
    for axis in range(d):
        shape = [1] * d
        shape[axis] = nodes
        weights = weights * np.reshape(w_1d, shape)
    pts = np.stack([g.ravel() for g in grids], axis=1) + theta0
    radii = np.linalg.norm(pts, axis=1)
    dens = np.array([math.exp(radial_log_density(d, r)) for r in radii])
    return float(np.sum(weights.ravel() * dens))


def offcenter_ball_mass_brackets(scenario: RiskScenario, n):
    """(lower, upper) prior-mass brackets for a ball centered off the origin.

    Lower: largest inscribed hypercube (half-side r/sqrt(d)); upper: the
    circumscribed hypercube (half-side r).
    """
    r = kl_ball_radius(scenario, n)
    lower = _cube_mass(scenario.theta0, r / math.sqrt(scenario.d))
    upper = _cube_mass(scenario.theta0, r)
    return lower, upper


def kl_ball_prior_mass(scenario: RiskScenario, n):
    """Prior mass of the KL ball of size 1/n, in (0, 1).

    Radial quadrature at theta0 = 0; the inscribed-hypercube lower bound
    otherwise (the direction the risk-rate argument requires).
    """
    if scenario.centered:
        return origin_ball_mass(scenario.d, kl_ball_radius(scenario, n))
    return offcenter_ball_mass_brackets(scenario, n)[0]


def risk_upper_bound(scenario: RiskScenario, n):
    """Information-risk bound: 1/n - log(ball mass)/n."""
    mass = kl_ball_prior_mass(scenario, n)
    return (1.0 - math.log(mass)) / n


# ---------------------------------------------------------------------------
# Monte Carlo Cesaro-average risk
# ---------------------------------------------------------------------------


@dataclass
class McRisk:
    """Monte Carlo estimate with its standard error."""

    estimate: float
    std_error: float
    reps: int
    per_rep: np.ndarray = field(repr=False, default=None)


def _log_joint_given_scale(lam, n, d, sigma, s_within, mean_sq):
    """log prod_i N(y_i; theta, sigma^2 I) integrated over theta ~ N(0, lam^2 I).

    Coordinates are independent; each contributes a Normal with an
    equicorrelated n x n covariance, collapsed by Sherman-Morrison.
    """
    s2 = sigma * sigma
    tot = lam * lam * n + s2
    return (
        -0.5 * n * d * math.log(2.0 * math.pi)
        - 0.5 * d * (n - 1) * math.log(s2)
        - 0.5 * d * math.log(tot)
        - 0.5 * s_within / s2
        - 0.5 * n * mean_sq / tot
    )


def _log_prior_predictive(n, d, sigma, s_within, mean_sq, rel_tol=1e-10):
    """log m(y_1..y_n): half-Cauchy mixture of the collapsed Gaussian."""

    def log_f(lam):
        return _log_joint_given_scale(lam, n, d, sigma, s_within, mean_sq)

    grid = np.concatenate(([0.0], np.logspace(-4, 4, 81)))
    peak = max(log_f(l) for l in grid)

    def f(lam):
        return (2.0 / (math.pi * (1.0 + lam * lam))) * math.exp(log_f(lam) - peak)

    val = adaptive_quad(f, 0.0, 1.0, rel_tol=rel_tol) + adaptive_quad(
        f, 1.0, np.inf, rel_tol=rel_tol
    )
    return peak + math.log(val)


def cesaro_risk_mc(scenario: RiskScenario, n, reps, seed, target_se=None):
    """Monte Carlo Cesaro-average risk: (1/n) E log[prod p(y_i|theta0) / m(y)].

    The prior predictive m is computed by quadrature over the local scale
    after collapsing theta analytically, so the only randomness is the data.
    Raises ResourceError if a requested standard error is not reached.
    """
    if n < 2:
        raise DomainError("need n >= 2")
    if reps < 2:
        raise DomainError("need reps >= 2")
    d, sigma = scenario.d, scenario.sigma
    theta0 = np.asarray(scenario.theta0)
    vals = np.empty(reps)
    for r in range(reps):
        rng = make_rng(split_seed(seed, r))
        y = theta0 + sigma * rng.standard_normal((n, d))
        ybar = y.mean(axis=0)
        s_within = float(np.sum((y - ybar) ** 2))
        mean_sq = float(ybar @ ybar)
        resid0 = float(np.sum((y - theta0) ** 2))
        log_true = -0.5 * n * d * math.log(2.0 * math.pi * sigma * sigma) - 0.5 * resid0 / (
            sigma * sigma
        )
        vals[r] = (log_true - _log_prior_predictive(n, d, sigma, s_within, mean_sq)) / n
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(reps))
    if target_se is not None and se > target_se:
        raise ResourceError(
            f"standard error {se:.3e} exceeds target {target_se:.3e} after {reps} reps"
        )
    return McRisk(est, se, reps, vals)
