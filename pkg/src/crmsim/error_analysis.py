"""Truncation-error quantification: Monte Carlo protocol, moments, asymptotics, bounds."""

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import distributions as dist
from .constructions import (
    _arrival_times,
    _sample_phi,
    asymptotic_inverse,
    laplace_exponent,
    psi_inverse,
)
from .special_math import Tolerance, integrate_semiaxis


class InfiniteVarianceWarning(UserWarning):
    """The conditional truncation-error variance integral diverges."""


@dataclass
class ErrorReport:
    """Monte Carlo and asymptotic truncation-error estimates over a grid of n."""

    n_grid: np.ndarray
    mc_mean: np.ndarray
    mc_std: np.ndarray
    asym: np.ndarray
    slope_fit: float
    config: dict
    infinite_variance: bool = False

    def to_dict(self):
        return {
            "config": self.config,
            "n": self.n_grid.tolist(),
            "mc_mean": self.mc_mean.tolist(),
            "mc_std": self.mc_std.tolist(),
            "asym": [None if not np.isfinite(v) else v for v in self.asym.tolist()],
            "slope_fit": self.slope_fit,
            "infinite_variance": self.infinite_variance,
        }

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# crmsim error report\n")
            fh.write("# config: %s\n" % json.dumps(self.config, sort_keys=True))
            fh.write("# slope_fit: %r\n" % self.slope_fit)
            writer = csv.writer(fh)
            writer.writerow(["n", "mc_mean", "mc_std", "asym"])
            for i in range(len(self.n_grid)):
                a = self.asym[i]
                writer.writerow(
                    [
                        int(self.n_grid[i]),
                        repr(float(self.mc_mean[i])),
                        repr(float(self.mc_std[i])),
                        "" if not np.isfinite(a) else repr(float(a)),
                    ]
                )


def kernel_tail_exponent(kernel):
    """Decay rate of k(x) = 1 - Lambda at large x: inf means faster than any power."""
    if kernel.family == "inverse_gamma":
        return kernel.kappa
    if kernel.family == "pareto":
        return kernel.c
    if kernel.family == "deterministic":
        return math.inf
    return math.inf  # exponential and gamma kernels decay exponentially


def error_moment_finite(process, kernel, order):
    """Whether int w^order (1 - Lambda_w(t)) rho(dw) converges at the large-w end."""
    lo, hi = process.support
    if hi < math.inf or process.tau > 0:
        return True
    # stable-type tail w^{-1-sigma}: need kernel decay faster than order - sigma
    return kernel_tail_exponent(kernel) > order - process.sigma


def conditional_error_moments(process, kernel, t):
    """Mean and variance of the residual tail mass given the (n+1)-th arrival at t.

    Both are quadratures of w^k (1 - Lambda_w(t)) rho(dw); a divergent variance
    integral is flagged with InfiniteVarianceWarning and returned as inf.
    """
    if not t > 0:
        raise ValueError("conditional_error_moments requires t > 0")
    scale = min(1.0, 1.0 / t)
    mean = integrate_semiaxis(
        lambda w: w * (1.0 - kernel.cdf(w, t)) * process.density(w),
        tol=Tolerance(rel=1e-9, abs=1e-15),
        singularity_scale=scale,
    )
    if not error_moment_finite(process, kernel, 2.0):
        warnings.warn(
            "conditional error variance diverges for %s with kernel %s"
            % (process.label(), kernel.label()),
            InfiniteVarianceWarning,
        )
        return mean, math.inf
    var = integrate_semiaxis(
        lambda w: w * w * (1.0 - kernel.cdf(w, t)) * process.density(w),
        tol=Tolerance(rel=1e-9, abs=1e-15),
        singularity_scale=scale,
    )
    return mean, var


def asymptotic_error(process, kernel, n):
    """Leading-order residual mass after n atoms: C1 zeta0^{1/sigma} sigma^{1-1/sigma} n^{1-1/sigma}."""
    rv = process.rv_data()
    c1 = kernel.c1(rv.sigma)
    s = rv.sigma
    return c1 * rv.zeta0 ** (1.0 / s) * s ** (1.0 - 1.0 / s) * np.asarray(n, dtype=float) ** (
        1.0 - 1.0 / s
    )


def fit_loglog_slope(n_grid, means, upper_half=True):
    """OLS slope of log mean against log n; by default over the upper half of the grid."""
    n = np.asarray(n_grid, dtype=float)
    m = np.asarray(means, dtype=float)
    if upper_half and len(n) > 3:
        keep = len(n) // 2
        n, m = n[-keep - 1 :], m[-keep - 1 :]
    x, y = np.log(n), np.log(m)
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def _one_arrival_replicate(process, kernel, n_hat, n_idx, jump_reps, stream):
    xi = np.cumsum(stream.exponential(size=n_hat))
    if kernel.is_atomic:
        w_det = process.inverse_tail(xi)
        cs = np.cumsum(w_det)
        r = np.array([cs[-1] - (cs[i - 1] if i > 0 else 0.0) for i in n_idx])
        return np.tile(r, (jump_reps, 1))
    t = _arrival_times(process, kernel, xi)
    out = np.empty((jump_reps, len(n_idx)))
    for j in range(jump_reps):
        w = _sample_phi(process, kernel, t, stream.child(j + 1))
        cs = np.cumsum(w)
        out[j] = [cs[-1] - (cs[i - 1] if i > 0 else 0.0) for i in n_idx]
    return out


def mc_truncation_error(
    process, kernel, n_grid, n_hat, arrival_reps, jump_reps, rng, threads=1
):
    """Nested Monte Carlo estimate of R_{n, n_hat} = sum_{i=n}^{n_hat} W_i.

    Draws `arrival_reps` arrival-time sequences of length n_hat and, for each,
    `jump_reps` conditionally independent jump resamples; reports mean and
    standard deviation over all replicates for every n in the grid, alongside
    the asymptotic prediction where its conditions hold.
    """
    n_grid = np.asarray(sorted(int(v) for v in n_grid))
    n_hat = int(n_hat)
    if n_grid[0] < 1 or n_hat <= n_grid[-1]:
        raise ValueError("need 1 <= n_grid and n_hat > max(n_grid)")
    if arrival_reps < 1 or jump_reps < 1:
        raise ValueError("replicate counts must be >= 1")
    n_idx = n_grid - 1  # R_{n, n_hat} starts the sum at atom n (1-indexed)

    infinite_var = not error_moment_finite(process, kernel, 2.0)
    if infinite_var:
        warnings.warn(
            "truncation-error variance diverges for %s with kernel %s; reported "
            "standard deviations will not stabilize" % (process.label(), kernel.label()),
            InfiniteVarianceWarning,
        )

    def run(a):
        return _one_arrival_replicate(process, kernel, n_hat, n_idx, jump_reps, rng.child(a))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(arrival_reps)))
    else:
        blocks = [run(a) for a in range(arrival_reps)]
    samples = np.vstack(blocks)

    mc_mean = samples.mean(axis=0)
    mc_std = samples.std(axis=0, ddof=1) if len(samples) > 1 else np.zeros_like(mc_mean)
    try:
        asym = np.asarray(asymptotic_error(process, kernel, n_grid))
    except (ValueError, ArithmeticError):
        asym = np.full(len(n_grid), np.nan)
    slope = fit_loglog_slope(n_grid, mc_mean)
    config = {
        "process": process.to_dict(),
        "kernel": kernel.to_dict(),
        "n_grid": n_grid.tolist(),
        "n_hat": n_hat,
        "arrival_reps": int(arrival_reps),
        "jump_reps": int(jump_reps),
        "seed": rng.seed,
        "stream_id": rng.stream_id,
    }
    return ErrorReport(n_grid, mc_mean, mc_std, asym, slope, config, infinite_var)


# -- moment generating function and likelihood bound ---------------------------


def _residual_functional(process, kernel, t, h, extra_scales=()):
    """int h(w) (1 - Lambda_w(t)) rho(dw) with h bounded, vanishing-at-0 weight.

    Used inside an outer expectation, so a conservative declared error from
    the adaptive rule is tolerated as long as it stays well below 1e-6 of the
    estimate; genuine divergences still raise.
    """
    from .special_math import QuadratureError

    integrand = lambda w: h(w) * (1.0 - kernel.cdf(w, t)) * process.density(w)
    scales = [min(1.0, 1.0 / t) if t > 0 else 1.0] + list(extra_scales)
    try:
        return integrate_semiaxis(
            integrand, tol=Tolerance(rel=1e-9, abs=1e-13), singularity_scale=scales
        )
    except QuadratureError as exc:
        if exc.error_bound < max(1e-6 * abs(exc.estimate), 1e-8):
            return exc.estimate
        raise


def _gamma_epoch_expectation(integrand, n):
    """int gampdf(xi; n+1, 1) g(xi) dxi over the effective support of the epoch law."""
    from scipy import integrate as _integrate

    m = n + 1.0
    lo = max(0.0, m - 15.0 * math.sqrt(m))
    hi = m + 15.0 * math.sqrt(m) + 25.0
    val, err = _integrate.quad(
        lambda xi: dist.gamma_pdf(xi, m, 1.0) * integrand(xi),
        lo,
        hi,
        epsabs=1e-11,
        epsrel=1e-8,
        limit=300,
    )
    if err > max(1e-6 * abs(val), 1e-8):
        from .special_math import QuadratureError

        raise QuadratureError("epoch expectation did not converge", val, err)
    return val


def _phi_laplace(process, kernel, t, lam, f):
    """E[e^{-lam f(W)}] for W ~ phi_t (the size of the atom arriving at t)."""
    if kernel.is_atomic:
        return math.exp(-lam * f(1.0 / t))
    num = integrate_semiaxis(
        lambda w: math.exp(-lam * f(w)) * kernel.pdf(w, t) * process.density(w),
        tol=Tolerance(rel=1e-9, abs=1e-14),
        singularity_scale=[min(1.0, 1.0 / t), 1.0 / lam],
    )
    from .constructions import psi_density

    return num / psi_density(process, kernel, t)


def error_mgf(process, kernel, lam, n, f=None, include_boundary_atom=False):
    """E[e^{-lam R}] of the residual mass by double quadrature.

    The outer expectation runs over xi ~ Gamma(n+1, 1), the epoch of the
    (n+1)-th arrival; the inner integral thins the mean measure by the
    arrival cdf. As stated this is the exact transform of the mass strictly
    after the (n+1)-th atom; `include_boundary_atom` multiplies in the
    Laplace transform of that atom's own size, giving the exact transform of
    sum_{i > n} f(W_i) (the two agree to O(1/n)).
    """
    if not lam > 0:
        raise ValueError("error_mgf requires lam > 0")
    n = int(n)
    if f is None:
        f = lambda w: w

    def integrand(xi):
        t = float(psi_inverse(process, kernel, xi))
        inner = _residual_functional(
            process, kernel, t, lambda w: -np.expm1(-lam * f(w)), extra_scales=(1.0 / lam,)
        )
        atom = _phi_laplace(process, kernel, t, lam, f) if include_boundary_atom else 1.0
        return atom * math.exp(-inner)

    return _gamma_epoch_expectation(integrand, n)


def likelihood_bound(process, kernel, m, n, pi, statement_form=False):
    """Total-variation bound 1 - e^{-B_{m,n}} on the marginal-likelihood gap.

    B_{m,n} integrates (1 - pi(w)^m) against the thinned mean measure and the
    Gamma(n+1, 1) law of the truncation epoch. `statement_form` instead uses
    the looser m * (1 - pi(w)) weighting.
    """
    m = int(m)
    n = int(n)
    if m < 1:
        raise ValueError("likelihood_bound requires m >= 1")

    if statement_form:
        h = lambda w: m * (1.0 - pi(w))
    else:
        h = lambda w: 1.0 - pi(w) ** m

    def integrand(xi):
        t = float(psi_inverse(process, kernel, xi))
        return _residual_functional(process, kernel, t, h, extra_scales=(1.0 / m,))

    b = _gamma_epoch_expectation(integrand, n)
    return -math.expm1(-b)


def mc_residual_masses(process, kernel, n, n_hat, draws, rng, batch=64):
    """Monte Carlo draws of the residual mass, truncated at n_hat atoms.

    Returns two arrays of length `draws`: the mass strictly after the
    (n+1)-th atom (what the mgf quadrature describes) and the mass from atom
    n+1 onward. Requires a pair with vectorized arrival/weight laws.
    """
    n = int(n)
    n_hat = int(n_hat)
    if n_hat <= n + 1:
        raise ValueError("n_hat must exceed n + 1")
    strict = np.empty(draws)
    from_next = np.empty(draws)
    done = 0
    b = 0
    while done < draws:
        k = min(batch, draws - done)
        stream = rng.child(b)
        xi = np.cumsum(stream.exponential(size=(k, n_hat)), axis=1)
        t = _arrival_times(process, kernel, xi)
        w = _sample_phi(process, kernel, t, stream.child(0))
        cs = np.cumsum(w, axis=1)
        total = cs[:, -1]
        strict[done : done + k] = total - cs[:, n]
        from_next[done : done + k] = total - cs[:, n - 1] if n > 0 else total
        done += k
        b += 1
    return strict, from_next


# -- normalized-mixture prior demo ---------------------------------------------


@dataclass
class MixtureDemo:
    """A prior draw from the finite normalized-mixture approximation plus its joint density."""

    weights: np.ndarray
    assignments: np.ndarray
    joint_log_density: float
    thetas: np.ndarray
    observations: np.ndarray
    params: dist.EtgBfryParams


def mixture_prior_demo(alpha, sigma, tau, kappa, n, m, rng):
    """Simulate the finite mixture prior with tilted-generalized-BFRY weights.

    Weights are iid etgBFRY(kappa, sigma, kappa f(n), tau) where f(n) is the
    asymptotic inverse of the Laplace exponent (no numerical inversion
    needed); cluster labels are categorical in the normalized weights and the
    demo likelihood is a unit-variance Gaussian at the cluster location.
    """
    n = int(n)
    m = int(m)
    if n < 1 or m < 1:
        raise ValueError("mixture_prior_demo requires n >= 1 and m >= 1")
    from .arrival_kernels import ArrivalKernel
    from .size_measures import SizeMeasure

    process = SizeMeasure.ggp(alpha, sigma, tau)
    kernel = ArrivalKernel.gamma(kappa)
    t_mix = kappa * float(asymptotic_inverse(process, kernel, n))
    params = dist.EtgBfryParams(kappa, sigma, t_mix, tau)

    w = np.asarray(dist.sample_etgbfry(params, rng, size=n))
    thetas = rng.uniform(size=n)
    w_total = w.sum()
    cum = np.cumsum(w) / w_total
    z = np.searchsorted(cum, rng.uniform(size=m))
    z = np.minimum(z, n - 1)
    x = rng.normal(loc=thetas[z], scale=1.0, size=m)

    log_density = float(np.sum(np.log(dist.etgbfry_pdf(w, params))))
    log_density += float(np.sum(np.log(w[z])) - m * math.log(w_total))
    log_density += float(np.sum(np.log(dist.normal_pdf(x, thetas[z], 1.0))))
    # base measure is Uniform(0,1): log h(theta) = 0
    return MixtureDemo(w, z, log_density, thetas, x, params)
