"""Special-function kernel: generalized exponential integral, Kummer's
confluent hypergeometric function, and the two-variable confluent
hypergeometric function.

Every function here has an independent quadrature oracle (the ``*_quad``
variants) built on a different representation, so the series/continued
fraction code paths can be cross-validated end to end.

Evaluation regimes
------------------
* ``gen_exp_integral``: power/log series for x < 1 (separate expansions for
  integer and non-integer order), continued fraction for x >= 1.  The
  exponentially scaled variant computes exp(x)*E_nu(x) jointly so the product
  never overflows.
* ``kummer_1f1``: Taylor series for moderate arguments (with the Kummer
  transform applied for negative x), large-argument expansions once
  |x| > asymptotic_switch * |b|.
* ``phi1``: a series of Kummer functions (path A, valid for 0 <= x < 1 and
  0 < alpha < gamma) with a one-dimensional integral representation as
  path B / oracle.  ``log_phi1`` is the overflow-free form used by the
  posterior module.
"""

import math

import numpy as np
from scipy import special as sp

from .config import DEFAULT_CONFIG, SpecFunConfig
from .errors import DomainError, NumericalError
from .quadrature import adaptive_quad

__all__ = [
    "gen_exp_integral",
    "exp_scaled_gen_exp_integral",
    "gen_exp_integral_quad",
    "exp_scaled_gen_exp_integral_quad",
    "kummer_1f1",
    "log_kummer_1f1",
    "kummer_1f1_quad",
    "phi1",
    "log_phi1",
    "phi1_series_1f1",
    "phi1_double_series",
    "phi1_quadrature",
    "log_phi1_quadrature",
]

_INTEGER_EPS = 1e-9


def _is_nonpositive_integer(v):
    return v <= 0 and abs(v - round(v)) < _INTEGER_EPS


# ---------------------------------------------------------------------------
# Generalized exponential integral  E_nu(x) = int_1^inf exp(-x t) t^(-nu) dt
# ---------------------------------------------------------------------------


def _expint_series_noninteger(nu, x, config):
    """exp-scaled small-x series for non-integer order.

    E_nu(x) = Gamma(1-nu) x^(nu-1) - sum_k (-x)^k / (k! (1-nu+k)), x < 1.
    """
    total = sp.gamma(1.0 - nu) * x ** (nu - 1.0)
    term = 1.0
    for k in range(config.max_terms):
        total -= term / (1.0 - nu + k)
        term *= -x / (k + 1.0)
        if abs(term) < config.rel_tol * abs(total) + config.abs_tol:
            return math.exp(x) * total
    raise NumericalError(f"E_nu series did not converge (nu={nu}, x={x})")


def _expint_series_integer(n, x, config):
    """exp-scaled small-x series for integer order n >= 1 (log term)."""
    lead = (-x) ** (n - 1) / math.factorial(n - 1) * (sp.digamma(n) - math.log(x))
    total = lead
    term = 1.0
    for k in range(config.max_terms):
        if k != n - 1:
            total -= term / (1.0 - n + k)
        term *= -x / (k + 1.0)
        if abs(term) < config.rel_tol * abs(total) + config.abs_tol:
            return math.exp(x) * total
    raise NumericalError(f"E_n series did not converge (n={n}, x={x})")


def _expint_scaled_cf(nu, x, config):
    """Modified-Lentz continued fraction for exp(x) E_nu(x), x >= 1."""
    tiny = 1e-300
    b = x + nu
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, config.max_terms):
        a = -i * (nu - 1.0 + i)
        b += 2.0
        d = a * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        # convergence is linear near x = 1, so demand a margin below rel_tol
        if abs(delta - 1.0) < max(2e-16, 0.02 * config.rel_tol):
            return h
    raise NumericalError(f"E_nu continued fraction stalled (nu={nu}, x={x})")


def exp_scaled_gen_exp_integral(nu, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """exp(x) * E_nu(x), computed jointly so large x never overflows."""
    if x < 0:
        raise DomainError(f"generalized exponential integral needs x >= 0, got {x}")
    if x == 0.0:
        if nu <= 1.0:
            raise DomainError(f"E_nu(0) diverges for nu <= 1 (nu={nu})")
        return 1.0 / (nu - 1.0)
    if nu < 0:
        # March the order down from a base in [0, 1):
        # exp(x) E_(mu-1)(x) = (1 - (mu-1) exp(x) E_mu(x)) / x.
        steps = math.ceil(-nu)
        mu = nu + steps
        f = exp_scaled_gen_exp_integral(mu, x, config)
        for _ in range(steps):
            f = (1.0 - (mu - 1.0) * f) / x
            mu -= 1.0
        return f
    near = round(nu)
    if abs(nu - near) < _INTEGER_EPS and near == 0:
        return 1.0 / x
    if x >= 1.0:
        return _expint_scaled_cf(nu, x, config)
    if abs(nu - near) < _INTEGER_EPS:
        return _expint_series_integer(int(near), x, config)
    return _expint_series_noninteger(nu, x, config)


def gen_exp_integral(nu, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """Generalized exponential integral E_nu(x) for x >= 0.

    At x = 0 the integral equals 1/(nu-1) and requires nu > 1.
    """
    scaled = exp_scaled_gen_exp_integral(nu, x, config)
    return math.exp(-x) * scaled if x > 0 else scaled


def gen_exp_integral_quad(nu, x, rel_tol=1e-13):
    """Quadrature oracle: direct integral on t in (1, inf)."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        if nu <= 1.0:
            raise DomainError("divergent at x = 0 for nu <= 1")
        return 1.0 / (nu - 1.0)
    return math.exp(-x) * exp_scaled_gen_exp_integral_quad(nu, x, rel_tol)


def exp_scaled_gen_exp_integral_quad(nu, x, rel_tol=1e-13):
    """Quadrature oracle for exp(x) E_nu(x) = int_0^inf e^(-x s) (1+s)^(-nu) ds.

    Evaluated on (0, 1) after t = 1/(1+s); the e^(-x(1-t)/t) factor kills the
    t -> 0 endpoint for every real order.
    """
    if x <= 0:
        raise DomainError("oracle needs x > 0")

    if x >= 1.0:
        # mass sits at s ~ 1/x; integrate in w = x s
        def g(w):
            return math.exp(-w - nu * math.log1p(w / x)) / x

        cut = 60.0 + abs(nu)
        return adaptive_quad(g, 0.0, cut, rel_tol=rel_tol) + adaptive_quad(
            g, cut, np.inf, rel_tol=rel_tol
        )

    if nu < 0.5:
        # small x, growing power: e^x x^(nu-1) int_x^inf w^(-nu) e^(-w) dw
        def h(w):
            return math.exp(-w - nu * math.log(w))

        cut = max(1.0, -nu)
        tail = adaptive_quad(h, x, cut, rel_tol=rel_tol) + adaptive_quad(
            h, cut, np.inf, rel_tol=rel_tol
        )
        return math.exp(x + (nu - 1.0) * math.log(x)) * tail

    def f(t):
        if t <= 0.0:
            return 0.0
        return math.exp(-x * (1.0 - t) / t + (nu - 2.0) * math.log(t))

    peak = x / (2.0 - nu) if nu < 2.0 else None
    pts = [peak] if peak is not None and 0.0 < peak < 1.0 else None
    return adaptive_quad(f, 0.0, 1.0, rel_tol=rel_tol, points=pts)


# ---------------------------------------------------------------------------
# Kummer's confluent hypergeometric function 1F1(a, b, x)
# ---------------------------------------------------------------------------


def _kummer_series(a, b, x, config):
    """Plain Taylor series; exact finite sum when a is a nonpositive integer."""
    total = 1.0
    term = 1.0
    for k in range(config.max_terms):
        term *= (a + k) * x / ((b + k) * (k + 1.0))
        total += term
        if term == 0.0 or abs(term) < config.rel_tol * abs(total) + config.abs_tol:
            return total
    raise NumericalError(f"1F1 series did not converge (a={a}, b={b}, x={x})")


def _kummer_asymptotic_sum(p, q, z, config):
    """sum_k (p)_k (q)_k / (k! z^k), truncated at the smallest term."""
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(config.max_terms):
        term *= (p + k) * (q + k) / ((k + 1.0) * z)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if abs(term) < config.rel_tol * abs(total):
            break
    return total


def kummer_1f1(a, b, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """Confluent hypergeometric function 1F1(a, b, x) for real arguments.

    Uses the Taylor series for moderate x and the standard large-|x|
    expansions (for either sign of x) once |x| > asymptotic_switch * |b|.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 undefined for b a nonpositive integer (b={b})")
    if x == 0.0:
        return 1.0
    if _is_nonpositive_integer(a):
        return _kummer_series(a, b, x, config)  # terminating polynomial
    if abs(x) > config.asymptotic_switch * abs(b):
        if x > 0:
            front = sp.gamma(b) / sp.gamma(a) * math.exp(x) * x ** (a - b)
            return front * _kummer_asymptotic_sum(b - a, 1.0 - a, x, config)
        front = sp.gamma(b) / sp.gamma(b - a) * (-x) ** (-a)
        return front * _kummer_asymptotic_sum(a, a - b + 1.0, -x, config)
    if x < 0:
        # Kummer transform avoids cancellation in the alternating series.
        return math.exp(x) * _kummer_series(b - a, b, -x, config)
    return _kummer_series(a, b, x, config)


def log_kummer_1f1(a, b, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """log 1F1(a, b, x) on the positive-value domain, safe for huge |x|.

    Requires b > 0 and a > 0 (for x >= 0) or b - a > 0 (for x < 0), which
    guarantees the value is positive.
    """
    if b <= 0:
        raise DomainError(f"log 1F1 needs b > 0 (b={b})")
    if x == 0.0:
        return 0.0
    if x < 0:
        if b - a <= 0:
            raise DomainError("log 1F1 with x < 0 needs b - a > 0")
        return x + log_kummer_1f1(b - a, b, -x, config)
    if a <= 0:
        raise DomainError("log 1F1 with x > 0 needs a > 0")
    if x > config.asymptotic_switch * b:
        s = _kummer_asymptotic_sum(b - a, 1.0 - a, x, config)
        return sp.gammaln(b) - sp.gammaln(a) + x + (a - b) * math.log(x) + math.log(s)
    # Streaming log-sum of the (all positive) Taylor terms.
    log_term = 0.0
    peak = 0.0
    acc = 1.0
    for k in range(config.max_terms):
        log_term += math.log((a + k) * x / ((b + k) * (k + 1.0)))
        if log_term > peak:
            acc = acc * math.exp(peak - log_term) + 1.0
            peak = log_term
        else:
            inc = math.exp(log_term - peak)
            acc += inc
            if inc < config.rel_tol * acc and (a + k) * x < (b + k) * (k + 1.0):
                return peak + math.log(acc)
    raise NumericalError(f"log 1F1 series did not converge (a={a}, b={b}, x={x})")


def kummer_1f1_quad(a, b, x, rel_tol=1e-13):
    """Quadrature oracle via the Euler integral (needs b > a > 0)."""
    if not (b > a > 0):
        raise DomainError("Euler-integral oracle needs b > a > 0")
    lead = sp.gammaln(b) - sp.gammaln(a) - sp.gammaln(b - a)
    shift = max(x, 0.0)

    def f(t):
        return math.exp(
            x * t - shift + (a - 1.0) * math.log(t) + (b - a - 1.0) * math.log1p(-t)
        )

    # t = u^2 / t = 1 - v^2 substitutions remove the endpoint singularities
    half = math.sqrt(0.5)
    left = adaptive_quad(
        lambda u: 2.0 * u * f(u * u), 0.0, half, rel_tol=rel_tol
    )
    right = adaptive_quad(
        lambda v: 2.0 * v * f(1.0 - v * v), 0.0, half, rel_tol=rel_tol
    )
    return math.exp(lead + shift) * (left + right)


# ---------------------------------------------------------------------------
# Two-variable confluent hypergeometric function Phi1(alpha, beta, gamma, x, y)
# ---------------------------------------------------------------------------


def phi1_double_series(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """Reference double series, |x| < 1.  Test oracle only; needs moderate y.

    Phi1 = sum_{m,n} (alpha)_{m+n} (beta)_m x^m y^n / ((gamma)_{m+n} m! n!).
    The beta Pochhammer rides with the x index; this is what distinguishes
    the corrected Kummer-series reduction from its published-in-error form.
    """
    if abs(x) >= 1:
        raise DomainError("double series requires |x| < 1")
    total = 0.0
    cm = 1.0  # (beta)_m x^m / m!
    for m in range(config.max_terms):
        # inner sum over n with ratio ((alpha+m+n)/(gamma+m+n)) * y/(n+1)
        inner = 1.0
        t = 1.0
        for n in range(config.max_terms):
            t *= (alpha + m + n) * y / ((gamma + m + n) * (n + 1.0))
            inner += t
            if abs(t) < 1e-17 * abs(inner) + config.abs_tol:
                break
        lead = cm * sp.poch(alpha, m) / sp.poch(gamma, m)
        total += lead * inner
        if abs(lead * inner) < config.rel_tol * abs(total) + config.abs_tol and m > 2:
            return total
        cm *= beta + m
        cm *= x / (m + 1.0)
    raise NumericalError("Phi1 double series did not converge")


def phi1_series_1f1(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """Path A: Phi1 as a Kummer-function series (corrected coefficients).

    Phi1 = e^y sum_n [(alpha)_n (beta)_n x^n / ((gamma)_n n!)]
               1F1(gamma - alpha, gamma + n, -y)
    valid for 0 <= x < 1 and 0 < alpha < gamma.
    """
    if not (0.0 <= x < 1.0):
        raise DomainError(f"path A requires 0 <= x < 1 (x={x})")
    if not (0.0 < alpha < gamma):
        raise DomainError("path A requires 0 < alpha < gamma")
    total = 0.0
    coef = 1.0
    small = 0
    for n in range(config.max_terms):
        term = coef * kummer_1f1(gamma - alpha, gamma + n, -y, config)
        total += term
        small = small + 1 if abs(term) < config.rel_tol * abs(total) else 0
        if small >= 2 or (coef == 0.0):
            return math.exp(y) * total
        coef *= (alpha + n) * (beta + n) * x / ((gamma + n) * (n + 1.0))
    raise NumericalError("Phi1 Kummer series did not converge")


def log_phi1(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """log Phi1 by path A in log space; immune to overflow for any real y.

    Requires 0 <= x < 1, 0 < alpha < gamma, beta > 0 so all terms are
    positive.
    """
    if not (0.0 <= x < 1.0):
        raise DomainError(f"log Phi1 requires 0 <= x < 1 (x={x})")
    if not (0.0 < alpha < gamma):
        raise DomainError("log Phi1 requires 0 < alpha < gamma")
    if beta <= 0:
        raise DomainError("log Phi1 requires beta > 0")
    log_coef = 0.0
    peak = -math.inf
    acc = 0.0
    small = 0
    for n in range(config.max_terms):
        lt = log_coef + log_kummer_1f1(gamma - alpha, gamma + n, -y, config)
        if lt > peak:
            acc = acc * math.exp(peak - lt) + 1.0 if acc else 1.0
            peak = lt
            small = 0
        else:
            inc = math.exp(lt - peak)
            acc += inc
            small = small + 1 if inc < config.rel_tol * acc else 0
        if small >= 2 or x == 0.0:
            return y + peak + math.log(acc)
        log_coef += math.log((alpha + n) * (beta + n) * x / ((gamma + n) * (n + 1.0)))
    raise NumericalError("log Phi1 series did not converge")


def _phi1_integral(alpha, beta, gamma, x, y, rel_tol):
    """int_0^1 t^(a-1) (1-t)^(g-a-1) (1-x t)^(-b) e^(y t - shift) dt by halves."""
    shift = max(y, 0.0)

    def core(t):
        return math.exp(
            (alpha - 1.0) * math.log(t)
            + (gamma - alpha - 1.0) * math.log1p(-t)
            - beta * math.log1p(-x * t)
            + y * t
            - shift
        )

    half = math.sqrt(0.5)
    left = adaptive_quad(lambda u: 2.0 * u * core(u * u), 0.0, half, rel_tol=rel_tol)
    right = adaptive_quad(
        lambda v: 2.0 * v * core(1.0 - v * v), 0.0, half, rel_tol=rel_tol
    )
    return left + right, shift


def phi1_quadrature(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """Path B: one-dimensional integral representation (oracle grade).

    Needs alpha > 0, gamma - alpha > 0 and x < 1; beta, y unrestricted.
    """
    if not (alpha > 0 and gamma - alpha > 0):
        raise DomainError("path B requires alpha > 0 and gamma - alpha > 0")
    if x >= 1:
        raise DomainError("path B requires x < 1")
    integral, shift = _phi1_integral(alpha, beta, gamma, x, y, config.rel_tol)
    lead = sp.gammaln(gamma) - sp.gammaln(alpha) - sp.gammaln(gamma - alpha)
    return math.exp(lead + shift) * integral


def log_phi1_quadrature(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """log of path B, stable for large |y|; same domain as phi1_quadrature."""
    if not (alpha > 0 and gamma - alpha > 0):
        raise DomainError("path B requires alpha > 0 and gamma - alpha > 0")
    if x >= 1:
        raise DomainError("path B requires x < 1")
    integral, shift = _phi1_integral(alpha, beta, gamma, x, y, config.rel_tol)
    lead = sp.gammaln(gamma) - sp.gammaln(alpha) - sp.gammaln(gamma - alpha)
    return lead + shift + math.log(integral)


def phi1(alpha, beta, gamma, x, y, config: SpecFunConfig = DEFAULT_CONFIG):
    """Phi1(alpha, beta, gamma, x, y), dispatching path A then path B.

    Paths agree on their overlapping domain; DomainError if neither applies.
    """
    if 0.0 <= x < 1.0 and 0.0 < alpha < gamma:
        return phi1_series_1f1(alpha, beta, gamma, x, y, config)
    if alpha > 0 and gamma - alpha > 0 and x < 1:
        return phi1_quadrature(alpha, beta, gamma, x, y, config)
    raise DomainError(
        f"no evaluation path for Phi1(alpha={alpha}, beta={beta}, gamma={gamma}, "
        f"x={x}, y={y})"
    )
