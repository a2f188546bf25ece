"""Deterministic numerical kernel: special functions, half-line quadrature, root finding.

Everything in here is a pure function of its inputs and safe to call from
multiple threads.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special


@dataclass(frozen=True)
class Tolerance:
    """Error targets for iterative routines: relative, absolute, iteration cap."""

    rel: float = 1e-10
    abs: float = 1e-13
    max_iter: int = 100

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError("rel tolerance must be > 0")
        if self.abs < 0:
            raise ValueError("abs tolerance must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = Tolerance()


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    Carries the best estimate and the declared error bound so callers can
    decide whether to proceed anyway.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class BracketError(ArithmeticError):
    """Root bracketing failed within the allowed number of expansions."""


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_gamma requires x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def lower_incomplete_gamma(a, x, regularized=False):
    """gamma(a, x) = int_0^x u^{a-1} e^{-u} du, optionally divided by Gamma(a)."""
    if not a > 0:
        raise ValueError("lower_incomplete_gamma requires a > 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("lower_incomplete_gamma requires x >= 0")
    p = special.gammainc(a, x)
    if not regularized:
        p = p * math.gamma(a)
    return float(p) if p.ndim == 0 else p


def _upper_gamma_cf(a, x, max_iter=512):
    """Continued fraction for Gamma(a,x), valid for x not too small. Vectorized in x."""
    x = np.asarray(x, dtype=float)
    b0 = x + 1.0 - a
    tiny = 1e-300
    c = np.where(b0 == 0.0, tiny, b0)
    d = np.zeros_like(x)
    f = c.copy()
    converged = np.zeros_like(x, dtype=bool)
    for k in range(1, max_iter + 1):
        ak = -k * (k - a)
        bk = b0 + 2.0 * k
        d = bk + ak * d
        d = np.where(d == 0.0, tiny, d)
        c = bk + ak / c
        c = np.where(c == 0.0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(converged, f, f * delta)
        converged = converged | (np.abs(delta - 1.0) < 1e-16)
        if converged.all():
            break
    return np.exp(-x + a * np.log(x)) / f


def upper_incomplete_gamma(a, x):
    """Generalized Gamma(a, x) = int_x^inf u^{a-1} e^{-u} du for any real a, x > 0.

    For a <= 0 the integral still converges (x > 0 keeps the singular corner
    away); computed by continued fraction for moderate-to-large x and by the
    downward recurrence Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a otherwise.
    """
    a = float(a)
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if np.any(x_arr <= 0):
        raise ValueError("upper_incomplete_gamma requires x > 0")
    out = np.empty_like(x_arr)
    if a > 0:
        out[:] = special.gammaincc(a, x_arr) * math.gamma(a)
    else:
        big = x_arr >= 1.5
        if big.any():
            out[big] = _upper_gamma_cf(a, x_arr[big])
        if (~big).any():
            xs = x_arr[~big]
            # step up to a0 in [0, 1), then recurse back down
            m = int(math.ceil(-a))
            a0 = a + m
            if a0 == 0.0:
                g = special.exp1(xs)
            else:
                g = special.gammaincc(a0, xs) * math.gamma(a0)
            for j in range(m, 0, -1):
                aj = a + j - 1.0
                g = (g - xs**aj * np.exp(-xs)) / aj
            out[~big] = g
    return float(out[0]) if scalar else out


def incomplete_beta(x, a, b):
    """Unregularized incomplete beta B_x(a, b) = int_0^x u^{a-1} (1-u)^{b-1} du.

    b may be negative: for x < 1 the integrand stays finite at the upper
    endpoint, so the integral converges for every real b. Computed by adaptive
    quadrature with the algebraic endpoint weight u^{a-1} handled exactly.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("incomplete_beta requires 0 < x < 1")
    if not a > 0:
        raise ValueError("incomplete_beta requires a > 0")
    bm1 = b - 1.0
    val, err = integrate.quad(
        lambda u: (1.0 - u) ** bm1,
        0.0,
        x,
        weight="alg",
        wvar=(a - 1.0, 0.0),
        epsabs=1e-14,
        epsrel=1e-12,
        limit=200,
    )
    if err > 1e-9 * max(abs(val), 1e-300):
        raise QuadratureError("incomplete_beta quadrature did not converge", val, err)
    return val


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise ValueError("bessel_k requires x > 0")
    out = special.kv(nu, x_arr)
    if np.any(~np.isfinite(out)):
        raise OverflowError("bessel_k overflow for nu=%r, extreme argument" % (nu,))
    return float(out) if np.ndim(x) == 0 else out


def integrate_semiaxis(f, tol=None, singularity_scale=None):
    """Adaptive quadrature of f over (0, inf).

    Maps the half line to (0, 1) through w = u / (1 - u) and integrates
    adaptively; `singularity_scale` (a scale or an iterable of scales) splits
    the interval at those w-scales (useful when the integrand has structure
    near known scales, e.g. w^{-1-sigma} blow-up below w ~ 1). Raises
    QuadratureError with the best estimate attached if the declared error
    exceeds the tolerance.
    """
    tol = tol or DEFAULT_TOL

    def g(u):
        om = 1.0 - u
        w = u / om
        fw = f(w)
        if fw == 0.0:
            return 0.0
        return fw / (om * om)

    points = None
    if singularity_scale is not None:
        scales = np.atleast_1d(np.asarray(singularity_scale, dtype=float))
        scales = scales[(scales > 0) & np.isfinite(scales)]
        if len(scales):
            points = sorted(set(float(s / (1.0 + s)) for s in scales))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        est, err = integrate.quad(
            g, 0.0, 1.0, points=points, epsabs=tol.abs, epsrel=tol.rel, limit=500
        )
    if err > tol.abs + tol.rel * abs(est):
        raise QuadratureError(
            "integrate_semiaxis declared error %.3g exceeds tolerance" % err, est, err
        )
    return est


def invert_increasing(g, y, guess, tol=None):
    """Solve g(x) = y for a continuous nondecreasing unbounded g, x > 0.

    Expands a geometric bracket around `guess` (factor 4 per step), then runs
    a safeguarded Brent solve inside the bracket.
    """
    tol = tol or Tolerance(rel=1e-10, abs=0.0, max_iter=100)
    if not y > 0:
        raise ValueError("invert_increasing requires y > 0")
    if not guess > 0:
        raise ValueError("invert_increasing requires guess > 0")
    lo, hi = guess / 2.0, guess * 2.0
    glo, ghi = g(lo), g(hi)
    steps = 0
    while glo > y:
        hi, ghi = lo, glo
        lo /= 4.0
        glo = g(lo)
        steps += 1
        if steps > tol.max_iter:
            raise BracketError("could not bracket root below guess=%g" % guess)
    while ghi < y:
        lo, glo = hi, ghi
        hi *= 4.0
        ghi = g(hi)
        steps += 1
        if steps > tol.max_iter:
            raise BracketError("could not bracket root above guess=%g" % guess)
    if glo == y:
        return lo
    if ghi == y:
        return hi
    root = optimize.brentq(lambda x: g(x) - y, lo, hi, rtol=8.9e-16, maxiter=200)
    if abs(g(root) - y) > tol.rel * y + tol.abs:
        raise BracketError("root residual exceeds tolerance at x=%g" % root)
    return root
