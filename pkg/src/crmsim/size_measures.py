"""Size intensities rho(dw) of the supported processes: densities, tails, inverses."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .special_math import incomplete_beta, upper_incomplete_gamma

GGP = "ggp"
STABLE = "stable"
GAMMA_PROCESS = "gamma_process"
SBP = "sbp"
BETA_PROCESS = "beta_process"
TRANSFORMED_BP = "transformed_bp"

_GGP_LIKE = (GGP, STABLE, GAMMA_PROCESS)


@dataclass(frozen=True)
class RegularVariationData:
    """Tail index sigma and leading constant zeta0 of rho(w) ~ zeta0 w^{-1-sigma} near 0."""

    sigma: float
    zeta0: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("regular-variation index must lie in (0, 1)")
        if not self.zeta0 > 0:
            raise ValueError("zeta0 must be > 0")


@dataclass(frozen=True)
class SizeMeasure:
    """A size intensity with density, tail, inverse tail and asymptotic metadata.

    Families: generalized gamma (tilted stable), its stable (tau=0) and gamma
    (sigma=0) special cases, the stable beta process on (0,1), the plain beta
    process, and the transformed beta process rho(du) = u^{-2} du obtained
    from the change of variable u = -1/(alpha log w). The last one has
    infinite total mass but finite tail above any x > 0.
    """

    family: str
    alpha: float
    sigma: float = 0.0
    tau: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.family == GGP:
            ok = (0.0 < self.sigma < 1.0 and self.tau >= 0.0) or (
                self.sigma <= 0.0 and self.tau > 0.0
            )
            if not ok:
                raise ValueError(
                    "ggp requires sigma in (0,1) with tau >= 0, or sigma <= 0 with tau > 0"
                )
        elif self.family == STABLE:
            if not (0.0 < self.sigma < 1.0 and self.tau == 0.0):
                raise ValueError("stable requires sigma in (0,1) and tau = 0")
        elif self.family == GAMMA_PROCESS:
            if not (self.sigma == 0.0 and self.tau > 0.0):
                raise ValueError("gamma_process requires sigma = 0 and tau > 0")
        elif self.family == SBP:
            if not 0.0 < self.sigma < 1.0:
                raise ValueError("sbp supported for sigma in (0, 1) only")
            if not self.c > -self.sigma:
                raise ValueError("sbp requires c > -sigma")
        elif self.family in (BETA_PROCESS, TRANSFORMED_BP):
            pass
        else:
            raise ValueError("unknown size-measure family %r" % self.family)

    # -- constructors --------------------------------------------------------

    @classmethod
    def ggp(cls, alpha, sigma, tau):
        if tau == 0.0 and 0.0 < sigma < 1.0:
            return cls(STABLE, alpha, sigma, 0.0)
        if sigma == 0.0:
            return cls(GAMMA_PROCESS, alpha, 0.0, tau)
        return cls(GGP, alpha, sigma, tau)

    @classmethod
    def stable(cls, alpha, sigma):
        return cls(STABLE, alpha, sigma, 0.0)

    @classmethod
    def gamma_process(cls, alpha, tau):
        return cls(GAMMA_PROCESS, alpha, 0.0, tau)

    @classmethod
    def sbp(cls, alpha, sigma, c):
        return cls(SBP, alpha, sigma, 0.0, c)

    @classmethod
    def beta_process(cls, alpha):
        return cls(BETA_PROCESS, alpha)

    @classmethod
    def transformed_bp(cls, alpha):
        return cls(TRANSFORMED_BP, alpha)

    # -- basic queries ---------------------------------------------------------

    @property
    def is_ggp_like(self):
        return self.family in _GGP_LIKE

    @property
    def support(self):
        if self.family in (SBP, BETA_PROCESS):
            return (0.0, 1.0)
        return (0.0, math.inf)

    @property
    def infinite_activity(self):
        """Whether the total mass rho(0, inf) is infinite (series never runs out)."""
        if self.is_ggp_like:
            return self.sigma >= 0.0
        return True

    def label(self):
        if self.is_ggp_like:
            return "%s(alpha=%g, sigma=%g, tau=%g)" % (self.family, self.alpha, self.sigma, self.tau)
        if self.family == SBP:
            return "sbp(alpha=%g, sigma=%g, c=%g)" % (self.alpha, self.sigma, self.c)
        return "%s(alpha=%g)" % (self.family, self.alpha)

    # -- density / tail / inverse ---------------------------------------------

    def density(self, w):
        """rho(w); zero outside the support, domain error for w <= 0."""
        w = np.asarray(w, dtype=float)
        if np.any(w <= 0):
            raise ValueError("density requires w > 0")
        if self.is_ggp_like:
            out = (
                self.alpha
                / math.gamma(1.0 - self.sigma)
                * w ** (-1.0 - self.sigma)
                * np.exp(-self.tau * w)
            )
        elif self.family == SBP:
            inside = w < 1.0
            ws = np.where(inside, w, 0.5)
            out = np.where(
                inside,
                self.alpha
                / special.beta(1.0 - self.sigma, self.c + self.sigma)
                * ws ** (-self.sigma - 1.0)
                * (1.0 - ws) ** (self.c + self.sigma - 1.0),
                0.0,
            )
        elif self.family == BETA_PROCESS:
            out = np.where(w < 1.0, self.alpha / w, 0.0)
        else:  # transformed beta process
            out = w**-2.0
        return out if out.ndim else float(out)

    def tail_intensity(self, x):
        """rhobar(x) = integral of rho over (x, inf)."""
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("tail_intensity requires x > 0")
        if self.family == STABLE:
            out = self.alpha * x**-self.sigma / (self.sigma * math.gamma(1.0 - self.sigma))
        elif self.is_ggp_like:
            # alpha tau^sigma / Gamma(1-sigma) * Gamma(-sigma, tau x); sigma=0 gives alpha E1(tau x)
            out = (
                self.alpha
                * self.tau**self.sigma
                / math.gamma(1.0 - self.sigma)
                * upper_incomplete_gamma(-self.sigma, self.tau * x)
            )
        elif self.family == SBP:
            scalar = x.ndim == 0
            xs = np.atleast_1d(x)
            out = np.zeros_like(xs)
            norm = self.alpha / special.beta(1.0 - self.sigma, self.c + self.sigma)
            for i, xi in enumerate(xs):
                if xi < 1.0:
                    out[i] = norm * incomplete_beta(1.0 - xi, self.c + self.sigma, -self.sigma)
            out = out[0] if scalar else out
        elif self.family == BETA_PROCESS:
            out = np.where(x < 1.0, self.alpha * np.log(1.0 / np.minimum(x, 1.0)), 0.0)
        else:
            out = 1.0 / x
        out = np.asarray(out)
        return float(out) if out.ndim == 0 else out

    def inverse_tail(self, y):
        """Generalized inverse rhobar^{-1}(y) = inf{x : rhobar(x) <= y}."""
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise ValueError("inverse_tail requires y > 0")
        if self.family == STABLE:
            out = (y * self.sigma * math.gamma(1.0 - self.sigma) / self.alpha) ** (
                -1.0 / self.sigma
            )
        elif self.family == BETA_PROCESS:
            out = np.exp(-y / self.alpha)
        elif self.family == TRANSFORMED_BP:
            out = 1.0 / y
        elif self.is_ggp_like:
            out = self._ggp_inverse_tail(np.atleast_1d(y))
            out = out[0] if y.ndim == 0 else out
        else:  # SBP: scalar root finding on (0, 1)
            scalar = y.ndim == 0
            ys = np.atleast_1d(y)
            out = np.array([self._sbp_inverse_tail_scalar(v) for v in ys])
            out = out[0] if scalar else out
        out = np.asarray(out)
        return float(out) if out.ndim == 0 else out

    def _ggp_inverse_tail(self, y):
        # bracketed bisection in log x; the tempered tail underflows far out, so
        # seeds are capped before the geometric bracket expansion
        sig, tau = self.sigma, self.tau
        if sig > 0:
            seed = (y * sig * math.gamma(1.0 - sig) / self.alpha) ** (-1.0 / sig)
        else:
            seed = np.full_like(y, 1.0 / tau)
        seed = np.minimum(seed, 602.0 / tau)
        lo = seed.copy()
        hi = seed.copy()
        for _ in range(500):
            mask = (self.tail_intensity(lo) < y) & (lo > 1e-290)
            if not mask.any():
                break
            lo[mask] /= 4.0
        for _ in range(500):
            mask = self.tail_intensity(hi) > y
            if not mask.any():
                break
            hi[mask] *= 4.0
        # below float range (possible for sigma = 0, huge y): fall back to the
        # exponential-integral asymptotic, floored at the smallest positive double
        failed = self.tail_intensity(lo) < y
        slo, shi = np.log(lo), np.log(hi)
        for _ in range(80):
            mid = 0.5 * (slo + shi)
            high_tail = self.tail_intensity(np.exp(mid)) > y
            slo = np.where(high_tail, mid, slo)
            shi = np.where(high_tail, shi, mid)
        out = np.exp(0.5 * (slo + shi))
        if failed.any():
            tiny = np.exp(np.maximum(-y / self.alpha - 0.5772156649015329, -744.0)) / tau
            out = np.where(failed, np.maximum(tiny, 5e-324), out)
        return out

    def _sbp_inverse_tail_scalar(self, y):
        lo, hi = 0.5, 0.5
        while self.tail_intensity(lo) < y:
            lo /= 4.0
            if lo < 1e-300:
                raise ArithmeticError("sbp inverse tail underflow")
        while hi < 1.0 - 1e-12 and self.tail_intensity(hi) > y:
            hi = 1.0 - (1.0 - hi) / 4.0
        return optimize.brentq(
            lambda x: self.tail_intensity(x) - y, lo, hi, rtol=8.9e-16, maxiter=200
        )

    # -- asymptotics and transforms --------------------------------------------

    def rv_data(self):
        """Regular-variation metadata (sigma, zeta0); requires sigma in (0, 1)."""
        if self.is_ggp_like and 0.0 < self.sigma < 1.0:
            return RegularVariationData(self.sigma, self.alpha / math.gamma(1.0 - self.sigma))
        if self.family == SBP:
            return RegularVariationData(
                self.sigma, self.alpha / special.beta(1.0 - self.sigma, self.c + self.sigma)
            )
        raise ValueError(
            "regular-variation data requires a tail index sigma in (0, 1); %s has none"
            % self.label()
        )

    def to_beta_weight(self, u):
        """Map a transformed-beta-process atom back to a beta-process weight."""
        if self.family != TRANSFORMED_BP:
            raise ValueError("to_beta_weight only applies to the transformed beta process")
        return np.exp(-1.0 / (self.alpha * np.asarray(u, dtype=float)))

    def to_dict(self):
        return {
            "family": self.family,
            "alpha": self.alpha,
            "sigma": self.sigma,
            "tau": self.tau,
            "c": self.c,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d["alpha"], d.get("sigma", 0.0), d.get("tau", 0.0), d.get("c", 0.0))
