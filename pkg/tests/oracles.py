"""Shared independent oracles for the test suite.

The goodness-of-fit helper builds a cdf by piecewise Gauss-Legendre quadrature
of a density on a geometric grid (plus adaptive head/tail integrals), entirely
independent of the samplers under test, and feeds it to a KS test.
"""

import math

import numpy as np
from scipy import integrate, stats

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def numeric_cdf_grid(pdf, lo, hi, support=(0.0, np.inf), n_grid=4096):
    """Return (grid, cdf_on_grid, total_mass) for a density on `support`."""
    grid = np.geomspace(lo, hi, n_grid)
    a, b = grid[:-1, None], grid[1:, None]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * _GL_NODES[None, :]
    seg = (pdf(x.ravel()).reshape(x.shape) * _GL_WEIGHTS[None, :] * half[:, 0:1]).sum(axis=1)
    head = integrate.quad(pdf, support[0], lo, limit=200)[0] if lo > support[0] else 0.0
    cdf_vals = head + np.concatenate([[0.0], np.cumsum(seg)])
    if support[1] < np.inf:
        tail = integrate.quad(pdf, hi, support[1], limit=200)[0]
    else:
        # substitute v = hi/w so heavy power-law tails become endpoint-integrable
        tail = integrate.quad(lambda v: pdf(hi / v) * hi / v**2, 0.0, 1.0, limit=200)[0]
    return grid, cdf_vals, cdf_vals[-1] + tail


def ks_pvalue_against_pdf(sample, pdf, support=(0.0, np.inf)):
    """KS p-value of `sample` against the numerically integrated cdf of `pdf`."""
    sample = np.asarray(sample, dtype=float)
    lo = max(sample.min() * 0.5, support[0] + 1e-300)
    hi = sample.max() * 2.0
    if support[1] < np.inf:
        hi = min(hi, support[1] - 1e-12)
    grid, cdf_vals, total = numeric_cdf_grid(pdf, lo, hi, support)
    assert abs(total - 1.0) < 1e-5, "oracle cdf normalizes to %r" % total
    cdf = lambda s: np.interp(s, grid, cdf_vals, left=0.0, right=cdf_vals[-1]) / total
    return stats.kstest(sample, cdf).pvalue


def mc_band(values, k=3.0):
    """(mean, k standard errors) of a Monte Carlo sample."""
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(k * values.std(ddof=1) / math.sqrt(len(values)))
