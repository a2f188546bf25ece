"""Random variate generators and densities: primitives, the BFRY family, GIG.

Sampling conventions follow the rate parameterization throughout: a
Gamma(shape, rate) variable has density rate^shape w^{shape-1} e^{-rate w} /
Gamma(shape). Every sampler takes an RngStream; identical (seed, stream_id)
reproduce identical variate sequences.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .special_math import incomplete_beta, integrate_semiaxis, upper_incomplete_gamma


class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    Distinct stream ids (or child indices) give statistically independent
    streams backed by numpy's SeedSequence/PCG64.
    """

    def __init__(self, seed, stream_id=0, _path=()):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._path = tuple(int(i) for i in _path)
        key = (self.stream_id,) + self._path
        self.generator = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=key)
        )

    def child(self, *indices):
        """Independent derived stream; deterministic function of the indices."""
        return RngStream(self.seed, self.stream_id, self._path + tuple(indices))

    def __repr__(self):
        return "RngStream(seed=%d, stream_id=%d, path=%r)" % (
            self.seed,
            self.stream_id,
            self._path,
        )

    # -- primitive laws ----------------------------------------------------

    def uniform(self, size=None):
        return self.generator.uniform(0.0, 1.0, size=size)

    def exponential(self, rate=1.0, size=None):
        if np.any(np.asarray(rate) <= 0):
            raise ValueError("exponential rate must be > 0")
        return self.generator.exponential(1.0, size=size) / rate

    def gamma(self, shape, rate=1.0, size=None):
        if np.any(np.asarray(shape) <= 0) or np.any(np.asarray(rate) <= 0):
            raise ValueError("gamma shape and rate must be > 0")
        return self.generator.gamma(shape, 1.0, size=size) / rate

    def beta(self, a, b, size=None):
        if a <= 0 or b <= 0:
            raise ValueError("beta parameters must be > 0")
        return self.generator.beta(a, b, size=size)

    def inverse_gamma(self, shape, scale, size=None):
        """InverseGamma(shape, scale): density scale^shape w^{-shape-1} e^{-scale/w} / Gamma(shape)."""
        if np.any(np.asarray(shape) <= 0) or np.any(np.asarray(scale) <= 0):
            raise ValueError("inverse_gamma parameters must be > 0")
        return scale / self.generator.gamma(shape, 1.0, size=size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size=size)


# -- module-level sampler aliases ------------------------------------------


def sample_uniform(rng, size=None):
    return rng.uniform(size=size)


def sample_exponential(rate, rng, size=None):
    return rng.exponential(rate, size=size)


def sample_gamma(shape, rate, rng, size=None):
    return rng.gamma(shape, rate, size=size)


def sample_beta(a, b, rng, size=None):
    return rng.beta(a, b, size=size)


def sample_inverse_gamma(shape, scale, rng, size=None):
    return rng.inverse_gamma(shape, scale, size=size)


# -- primitive densities ----------------------------------------------------


def uniform_pdf(w):
    w = np.asarray(w, dtype=float)
    return np.where((w > 0) & (w < 1), 1.0, 0.0)


def exponential_pdf(w, rate):
    w = np.asarray(w, dtype=float)
    return np.where(w >= 0, rate * np.exp(-rate * w), 0.0)


def gamma_pdf(w, shape, rate):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    pos = w > 0
    lw = np.log(w, where=pos, out=np.full_like(w, -np.inf))
    logp = shape * np.log(rate) + (shape - 1.0) * lw - rate * w - special.gammaln(shape)
    np.exp(logp, where=pos, out=out)
    return out if out.ndim else float(out)


def beta_pdf(w, a, b):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inside = (w > 0) & (w < 1)
    logp = (
        (a - 1.0) * np.log(w, where=inside, out=np.zeros_like(w))
        + (b - 1.0) * np.log1p(-w, where=inside, out=np.zeros_like(w))
        - special.betaln(a, b)
    )
    np.exp(logp, where=inside, out=out)
    return out if out.ndim else float(out)


def inverse_gamma_pdf(w, shape, scale):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    pos = w > 0
    lw = np.log(w, where=pos, out=np.full_like(w, np.inf))
    logp = shape * math.log(scale) - (shape + 1.0) * lw - scale / np.where(pos, w, 1.0) - special.gammaln(shape)
    np.exp(logp, where=pos, out=out)
    return out if out.ndim else float(out)


def normal_pdf(x, loc, scale):
    x = np.asarray(x, dtype=float)
    z = (x - loc) / scale
    return np.exp(-0.5 * z * z) / (scale * math.sqrt(2.0 * math.pi))


# -- BFRY -------------------------------------------------------------------


def _check_sigma(sigma):
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")


def bfry_pdf(w, sigma):
    """Density sigma w^{-1-sigma} (1 - e^{-w}) / Gamma(1-sigma) on (0, inf)."""
    _check_sigma(sigma)
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    out = np.where(
        pos, sigma * ws ** (-1.0 - sigma) * (-np.expm1(-ws)) / math.gamma(1.0 - sigma), 0.0
    )
    return out if out.ndim else float(out)


def sample_bfry(sigma, rng, size=None):
    """Ratio of independent Gamma(1-sigma, 1) and Beta(sigma, 1) variables."""
    _check_sigma(sigma)
    g = rng.gamma(1.0 - sigma, 1.0, size=size)
    b = rng.beta(sigma, 1.0, size=size)
    return g / b


def etbfry_pdf(w, sigma, t, tau):
    """Exponentially tilted BFRY density on (0, inf); tau = 0 falls back to a scaled BFRY."""
    _check_sigma(sigma)
    if t <= 0 or tau < 0:
        raise ValueError("etbfry requires t > 0 and tau >= 0")
    w = np.asarray(w, dtype=float)
    norm = math.gamma(1.0 - sigma) * ((t + tau) ** sigma - tau**sigma) / sigma
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    out = np.where(pos, ws ** (-1.0 - sigma) * np.exp(-tau * ws) * (-np.expm1(-t * ws)) / norm, 0.0)
    return out if out.ndim else float(out)


def sample_etbfry(sigma, t, tau, rng, size=None):
    """G * ((t+tau)^sigma (1-U) + tau^sigma U)^{-1/sigma}, G ~ Gamma(1-sigma, 1)."""
    _check_sigma(sigma)
    if t <= 0 or tau < 0:
        raise ValueError("etbfry requires t > 0 and tau >= 0")
    g = rng.gamma(1.0 - sigma, 1.0, size=size)
    u = rng.uniform(size=size)
    mix = (t + tau) ** sigma * (1.0 - u) + tau**sigma * u
    return g * mix ** (-1.0 / sigma)


def gbfry_pdf(w, kappa, sigma):
    """Generalized BFRY density sigma w^{-1-sigma} gamma(kappa, w) / Gamma(kappa-sigma)."""
    _check_sigma(sigma)
    if not kappa > sigma:
        raise ValueError("gbfry requires kappa > sigma")
    w = np.asarray(w, dtype=float)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    inc = special.gammainc(kappa, ws) * math.gamma(kappa)
    out = np.where(pos, sigma * ws ** (-1.0 - sigma) * inc / math.gamma(kappa - sigma), 0.0)
    return out if out.ndim else float(out)


def sample_gbfry(kappa, sigma, rng, size=None):
    """Ratio of independent Gamma(kappa-sigma, 1) and Beta(sigma, 1) variables."""
    _check_sigma(sigma)
    if not kappa > sigma:
        raise ValueError("gbfry requires kappa > sigma")
    g = rng.gamma(kappa - sigma, 1.0, size=size)
    b = rng.beta(sigma, 1.0, size=size)
    return g / b


# -- exponentially tilted generalized BFRY ----------------------------------


@dataclass(frozen=True)
class EtgBfryParams:
    """Parameters (kappa, sigma, t, tau) of the tilted generalized BFRY law.

    kappa > sigma keeps the density proper; sigma may drop below zero (and
    does, after conjugate updates) as long as it stays below kappa. sigma in
    (0, 1) is the regime used by the random-measure constructions.
    """

    kappa: float
    sigma: float
    t: float
    tau: float

    def __post_init__(self):
        if not self.kappa > self.sigma:
            raise ValueError("etgbfry requires kappa > sigma")
        if not self.t > 0:
            raise ValueError("etgbfry requires t > 0")
        if not self.tau > 0:
            raise ValueError("etgbfry requires tau > 0")


def etgbfry_log_norm(p):
    """Log normalizing constant: log of tau^sigma Gamma(kappa-sigma) B_{t/(t+tau)}(kappa, -sigma)."""
    x = p.t / (p.t + p.tau)
    return (
        p.sigma * math.log(p.tau)
        + math.lgamma(p.kappa - p.sigma)
        + math.log(incomplete_beta(x, p.kappa, -p.sigma))
    )


def etgbfry_pdf(w, p):
    """Normalized density w^{-sigma-1} e^{-tau w} gamma(kappa, t w) / norm."""
    w = np.asarray(w, dtype=float)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    inc = special.gammainc(p.kappa, p.t * ws) * math.gamma(p.kappa)
    log_unnorm = (-p.sigma - 1.0) * np.log(ws) - p.tau * ws
    out = np.where(pos, np.exp(log_unnorm - etgbfry_log_norm(p)) * inc, 0.0)
    return out if out.ndim else float(out)


def etgbfry_mixture_weights(p, tail=1e-14, max_components=10**6):
    """Unnormalized gamma-mixture weights c_j, component j being Gamma(kappa+j-sigma, t+tau).

    c_j = Gamma(kappa) (t+tau)^sigma x^{kappa+j} Gamma(kappa+j-sigma) / Gamma(kappa+j+1)
    with x = t/(t+tau); the ratio c_{j+1}/c_j = x (kappa+j-sigma)/(kappa+j+1)
    eventually drops below 1 geometrically, so the array is truncated once the
    remaining mass is below `tail` relative to the running sum.
    """
    x = p.t / (p.t + p.tau)
    log_c0 = (
        math.lgamma(p.kappa)
        + p.sigma * math.log(p.t + p.tau)
        + p.kappa * math.log(x)
        + math.lgamma(p.kappa - p.sigma)
        - math.lgamma(p.kappa + 1.0)
    )
    weights = []
    block = 4096
    c_log = log_c0
    c0 = math.exp(log_c0)
    cur = c0
    total = 0.0
    j = 0
    while True:
        js = np.arange(j, j + block, dtype=float)
        # ratios[i] = c_{j+i} / c_{j+i-1}; the first slot holds the running value
        ratios = x * (p.kappa + js - 1.0 - p.sigma) / (p.kappa + js)
        ratios[0] = 1.0
        vals = cur * np.cumprod(ratios)
        weights.append(vals)
        total += vals.sum()
        j += block
        cur = vals[-1] * x * (p.kappa + j - 1.0 - p.sigma) / (p.kappa + j)
        # geometric bound on the remaining mass once the ratio is below 1
        r = x * (p.kappa + j - p.sigma) / (p.kappa + j + 1.0)
        if r < 1.0 and cur / (1.0 - r) < tail * total:
            break
        if j >= max_components:
            raise RuntimeError("etgbfry mixture did not truncate within %d components" % max_components)
    return np.concatenate(weights)


def _sample_etgbfry_rejection(p, rng, n):
    # tilt-rejection route for t >> tau, where the mixture needs too many
    # components; the envelope constant is 1 in both directions of the tilt
    out = np.empty(n)
    filled = 0
    proposed = 0
    while filled < n:
        batch = max(1024, 2 * (n - filled))
        if p.sigma > 0:
            w0 = sample_gbfry(p.kappa, p.sigma, rng, size=batch) / p.t
            accept = rng.uniform(size=batch) < np.exp(-p.tau * w0)
        else:
            w0 = rng.gamma(-p.sigma, p.tau, size=batch)
            accept = rng.uniform(size=batch) < special.gammainc(p.kappa, p.t * w0)
        proposed += batch
        acc = w0[accept]
        take = min(len(acc), n - filled)
        out[filled : filled + take] = acc[:take]
        filled += take
        if proposed > max(10_000_000, n * 100_000):
            raise RuntimeError("etgbfry rejection sampler stalled")
    return out


def sample_etgbfry(p, rng, size=None):
    """Sample the gamma mixture by inverse cdf, or by tilt rejection when t >> tau.

    The mixture truncation length grows like 1/(1 - x) with x = t/(t+tau); once
    that exceeds the component budget the sampler switches to rejection with an
    exact envelope (untilted generalized-BFRY proposal for sigma > 0, the
    Gamma(-sigma, tau) limit law for sigma < 0).
    """
    scalar = size is None
    n = 1 if scalar else int(size)
    x = p.t / (p.t + p.tau)
    est_components = 40.0 / max(1.0 - x, 1e-12)
    if est_components > 200_000 and p.sigma != 0.0:
        w = _sample_etgbfry_rejection(p, rng, n)
        return float(w[0]) if scalar else w
    c = etgbfry_mixture_weights(p)
    cum = np.cumsum(c)
    total = cum[-1]
    u = rng.uniform(size=n) * total
    j = np.searchsorted(cum, u)
    j = np.minimum(j, len(c) - 1)
    shapes = p.kappa + j - p.sigma
    w = rng.gamma(shapes, 1.0, size=n) / (p.t + p.tau)
    return float(w[0]) if scalar else w


@dataclass(frozen=True)
class PoissonObs:
    lam: float
    x: float

    def __post_init__(self):
        if self.lam <= 0 or self.x < 0:
            raise ValueError("Poisson observation requires lam > 0 and x >= 0")


@dataclass(frozen=True)
class GammaObs:
    a: float
    x: float

    def __post_init__(self):
        if self.a < 0 or self.x < 0:
            raise ValueError("Gamma observation requires a >= 0 and x >= 0")


@dataclass(frozen=True)
class NormalObs:
    mu: float
    x: float


@dataclass(frozen=True)
class ParetoObs:
    x0: float
    x: float

    def __post_init__(self):
        if self.x0 <= 0 or self.x < self.x0:
            raise ValueError("Pareto observation requires x >= x0 > 0")


def etgbfry_conjugate_update(p, obs):
    """Posterior parameters after one observation from a conjugate likelihood.

    Poisson(lam W): (kappa, sigma - x, t, tau + lam);
    Gamma(a, rate W): (kappa, sigma - a, t, tau + x);
    Normal(mu, precision W): (kappa, sigma - 1/2, t, tau + (x-mu)^2/2);
    Pareto(x0, W): (kappa, sigma - 1, t, tau + log(x/x0)).
    """
    if isinstance(obs, PoissonObs):
        return EtgBfryParams(p.kappa, p.sigma - obs.x, p.t, p.tau + obs.lam)
    if isinstance(obs, GammaObs):
        return EtgBfryParams(p.kappa, p.sigma - obs.a, p.t, p.tau + obs.x)
    if isinstance(obs, NormalObs):
        return EtgBfryParams(p.kappa, p.sigma - 0.5, p.t, p.tau + 0.5 * (obs.x - obs.mu) ** 2)
    if isinstance(obs, ParetoObs):
        return EtgBfryParams(p.kappa, p.sigma - 1.0, p.t, p.tau + math.log(obs.x / obs.x0))
    raise TypeError("unsupported likelihood observation: %r" % (obs,))


# -- inverse generalized BFRY ------------------------------------------------


def igbfry_pdf(w, kappa, sigma):
    """Density sigma w^{-1-sigma} Gamma(kappa, 1/w) / Gamma(kappa+sigma)."""
    _check_sigma(sigma)
    if not kappa > 0:
        raise ValueError("igbfry requires kappa > 0")
    w = np.asarray(w, dtype=float)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    inc = special.gammaincc(kappa, 1.0 / ws) * math.gamma(kappa)
    out = np.where(pos, sigma * ws ** (-1.0 - sigma) * inc / math.gamma(kappa + sigma), 0.0)
    return out if out.ndim else float(out)


def sample_igbfry(kappa, sigma, rng, size=None):
    """Ratio of independent InverseGamma(kappa+sigma, 1) and Beta(sigma, 1) variables."""
    _check_sigma(sigma)
    if not kappa > 0:
        raise ValueError("igbfry requires kappa > 0")
    g = rng.inverse_gamma(kappa + sigma, 1.0, size=size)
    b = rng.beta(sigma, 1.0, size=size)
    return g / b


def etigbfry_pdf_unnorm(w, kappa, sigma, t, tau):
    """Unnormalized density w^{-1-sigma} e^{-tau w} Gamma(kappa, 1/(t w))."""
    w = np.asarray(w, dtype=float)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    inc = special.gammaincc(kappa, 1.0 / (t * ws)) * math.gamma(kappa)
    out = np.where(pos, ws ** (-1.0 - sigma) * np.exp(-tau * ws) * inc, 0.0)
    return out if out.ndim else float(out)


_etigbfry_norm_cache = {}


def etigbfry_norm_constant(kappa, sigma, t, tau):
    """Normalization of the tilted inverse generalized BFRY density.

    No closed form is available; always computed by quadrature (cached).
    """
    key = (kappa, sigma, t, tau)
    if key not in _etigbfry_norm_cache:
        _etigbfry_norm_cache[key] = integrate_semiaxis(
            lambda w: etigbfry_pdf_unnorm(w, kappa, sigma, t, tau),
            singularity_scale=1.0 / t,
        )
    return _etigbfry_norm_cache[key]


def etigbfry_pdf(w, kappa, sigma, t, tau):
    return etigbfry_pdf_unnorm(w, kappa, sigma, t, tau) / etigbfry_norm_constant(
        kappa, sigma, t, tau
    )


def sample_etigbfry(kappa, sigma, t, tau, rng, size=None, return_acceptance=False):
    """Rejection sampler: propose igBFRY(kappa, sigma)/t, accept with prob e^{-tau w}.

    The tilt factor is bounded by one, so the untilted proposal is a valid
    envelope with constant 1. Warns when the empirical acceptance rate falls
    below 1e-3.
    """
    _check_sigma(sigma)
    if kappa <= 0 or t <= 0 or tau < 0:
        raise ValueError("etigbfry requires kappa > 0, t > 0, tau >= 0")
    scalar = size is None
    n = 1 if scalar else int(size)
    out = np.empty(n)
    filled = 0
    proposed = 0
    accepted = 0
    max_proposals = max(10_000_000, n * 100_000)
    while filled < n:
        batch = max(1024, 2 * (n - filled))
        w0 = sample_igbfry(kappa, sigma, rng, size=batch) / t
        accept = rng.uniform(size=batch) < np.exp(-tau * w0)
        proposed += batch
        accepted += int(accept.sum())
        acc = w0[accept]
        take = min(len(acc), n - filled)
        out[filled : filled + take] = acc[:take]
        filled += take
        if proposed > max_proposals:
            raise RuntimeError("etigbfry rejection sampler stalled (acceptance too low)")
    rate = accepted / proposed if proposed else 1.0
    if rate < 1e-3:
        warnings.warn("etigbfry acceptance rate %.2e is very low" % rate)
    result = float(out[0]) if scalar else out
    if return_acceptance:
        return result, rate
    return result


# -- generalized inverse Gaussian --------------------------------------------


def gig_pdf(w, p, a, b):
    """GIG density (a/b)^{p/2} w^{p-1} e^{-(a w + b/w)/2} / (2 K_p(sqrt(ab)))."""
    if a <= 0 or b <= 0:
        raise ValueError("gig requires a > 0 and b > 0")
    w = np.asarray(w, dtype=float)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    lognorm = 0.5 * p * math.log(a / b) - math.log(2.0 * special.kv(p, math.sqrt(a * b)))
    logp = lognorm + (p - 1.0) * np.log(ws) - 0.5 * (a * ws + b / ws)
    out = np.where(pos, np.exp(logp), 0.0)
    return out if out.ndim else float(out)


def _gig_psi(x, alpha, lam):
    return -alpha * (math.cosh(x) - 1.0) - lam * (math.exp(x) - x - 1.0)


def _gig_dpsi(x, alpha, lam):
    return -alpha * math.sinh(x) - lam * (math.exp(x) - 1.0)


def _sample_gig_two_param(lam, omega, rng):
    # Devroye's rejection scheme for gig(lam, omega), lam >= 0; envelope made
    # of a flat center and two exponential tails around the mode.
    alpha = math.sqrt(omega * omega + lam * lam) - lam

    x = -_gig_psi(1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        t = 1.0
    elif x > 2.0:
        t = math.sqrt(2.0 / (alpha + lam))
    else:
        t = math.log(4.0 / (alpha + 2.0 * lam))

    x = -_gig_psi(-1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        s = 1.0
    elif x > 2.0:
        s = math.sqrt(4.0 / (alpha * math.cosh(1.0) + lam))
    else:
        if alpha == 0.0:
            s = 1.0 / lam
        elif lam == 0.0:
            s = math.log(1.0 + 1.0 / alpha + math.sqrt(1.0 / alpha**2 + 2.0 / alpha))
        else:
            s = min(
                1.0 / lam,
                math.log(1.0 + 1.0 / alpha + math.sqrt(1.0 / alpha**2 + 2.0 / alpha)),
            )

    eta = -_gig_psi(t, alpha, lam)
    zeta = -_gig_dpsi(t, alpha, lam)
    theta = -_gig_psi(-s, alpha, lam)
    xi = _gig_dpsi(-s, alpha, lam)
    pp = 1.0 / xi
    r = 1.0 / zeta
    td = t - r * eta
    sd = s - pp * theta
    q = td + sd

    while True:
        u = rng.generator.random()
        v = rng.generator.random()
        ww = rng.generator.random()
        if u < q / (pp + q + r):
            cand = -sd + q * v
        elif u < (q + r) / (pp + q + r):
            cand = td - r * math.log(v)
        else:
            cand = -sd + pp * math.log(v)
        if -sd <= cand <= td:
            env = 1.0
        elif cand > td:
            env = math.exp(-eta - zeta * (cand - t))
        else:
            env = math.exp(-theta + xi * (cand + s))
        if ww * env <= math.exp(_gig_psi(cand, alpha, lam)):
            break
    return math.exp(cand) * (lam / omega + math.sqrt(1.0 + lam * lam / (omega * omega)))


def sample_gig(p, a, b, rng, size=None):
    """GIG(p, a, b) variates, density proportional to w^{p-1} e^{-(a w + b/w)/2}."""
    if a <= 0 or b <= 0:
        raise ValueError("gig requires a > 0 and b > 0")
    scalar = size is None
    n = 1 if scalar else int(size)
    lam = float(p)
    omega = math.sqrt(a * b)
    swap = lam < 0
    if swap:
        lam = -lam
    ratio = math.sqrt(a / b)
    out = np.empty(n)
    for i in range(n):
        v = _sample_gig_two_param(lam, omega, rng)
        if swap:
            v = 1.0 / v
        out[i] = v / ratio
    return float(out[0]) if scalar else out
