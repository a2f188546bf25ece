import math

import numpy as np
import pytest
from scipy import integrate, stats

from oracles import ks_pvalue_against_pdf, mc_band

from crmsim import distributions as d
from crmsim.special_math import integrate_semiaxis

# frozen quadrature oracles (generating code alongside each test)
BFRY_HALF_P_GT_1 = 0.51393504188774464
GBFRY_2_HALF_P_LE_1 = 0.12942912327479691
IGBFRY_1_HALF_RECIP_MEAN = 0.5


def stream(tag=0):
    return d.RngStream(20240 + tag)


# -- rng stream ----------------------------------------------------------------


def test_stream_reproducible():
    a = d.RngStream(5, 2).uniform(size=10)
    b = d.RngStream(5, 2).uniform(size=10)
    np.testing.assert_array_equal(a, b)


def test_streams_differ_and_children_differ():
    base = d.RngStream(5)
    other = d.RngStream(5, stream_id=1)
    assert not np.allclose(base.uniform(size=8), other.uniform(size=8))
    c1 = d.RngStream(5).child(1).uniform(size=8)
    c2 = d.RngStream(5).child(2).uniform(size=8)
    assert not np.allclose(c1, c2)
    again = d.RngStream(5).child(1).uniform(size=8)
    np.testing.assert_array_equal(c1, again)


def test_primitive_domain_errors():
    rng = stream()
    with pytest.raises(ValueError):
        rng.gamma(-1.0, 1.0)
    with pytest.raises(ValueError):
        rng.beta(0.0, 1.0)
    with pytest.raises(ValueError):
        rng.exponential(rate=0.0)
    with pytest.raises(ValueError):
        rng.inverse_gamma(1.0, -2.0)


def test_gamma_shape_one_is_exponential():
    rng = stream(1)
    g = d.sample_gamma(1.0, 2.5, rng, size=100_000)
    e = d.sample_exponential(2.5, rng, size=100_000)
    assert stats.ks_2samp(g, e).pvalue > 0.01


def test_beta_1_1_is_uniform():
    u = d.sample_beta(1.0, 1.0, stream(2), size=100_000)
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_inverse_gamma_reciprocal_identity():
    a, b = 1.7, 2.2
    x = d.sample_inverse_gamma(a, b, stream(3), size=1000)
    y = b / d.RngStream(20243).gamma(a, 1.0, size=1000)
    np.testing.assert_allclose(x, y)


# -- BFRY ----------------------------------------------------------------------


def test_bfry_gof():
    w = d.sample_bfry(0.5, stream(4), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.bfry_pdf(x, 0.5)) > 0.01


def test_bfry_tail_probability():
    # oracle: quadrature of the density over (1, inf)
    val = integrate.quad(lambda x: d.bfry_pdf(x, 0.5), 1.0, np.inf, limit=200)[0]
    assert val == pytest.approx(BFRY_HALF_P_GT_1, rel=1e-10)
    w = d.sample_bfry(0.5, stream(5), size=200_000)
    phat = (w > 1.0).mean()
    se = math.sqrt(phat * (1 - phat) / len(w))
    assert abs(phat - BFRY_HALF_P_GT_1) < 3 * se + 1e-4


def _bfry_truncated_mean(sigma, m_cap):
    # E[min(W, M)] = int_0^M w f(w) dw + M P(W > M), by pieces (heavy tail)
    low = integrate.quad(lambda x: x * d.bfry_pdf(x, sigma), 0, m_cap, limit=400)[0]
    tail = integrate.quad(
        lambda v: d.bfry_pdf(m_cap / v, sigma) * m_cap / v**2, 0.0, 1.0, limit=400
    )[0]
    return low + m_cap * tail


def test_bfry_truncated_mean_growth():
    # E[min(W, M)] grows like M^{1-sigma}; raw mean is infinite
    sigma = 0.5
    w = d.sample_bfry(sigma, stream(6), size=400_000)
    for m_cap in (10.0, 100.0):
        oracle = _bfry_truncated_mean(sigma, m_cap)
        clipped = np.minimum(w, m_cap)
        mean, band = mc_band(clipped)
        assert abs(mean - oracle) < band
    big = _bfry_truncated_mean(sigma, 1e4)
    small = _bfry_truncated_mean(sigma, 1e2)
    assert big / small == pytest.approx((1e4 / 1e2) ** (1 - sigma), rel=0.12)


# -- etBFRY ----------------------------------------------------------------------


def test_etbfry_closed_mean():
    sigma, t, tau = 0.5, 2.0, 1.0
    closed = sigma * (tau ** (sigma - 1) - (t + tau) ** (sigma - 1)) / (
        (t + tau) ** sigma - tau**sigma
    )
    quad_mean = integrate_semiaxis(lambda w: w * d.etbfry_pdf(w, sigma, t, tau))
    assert closed == pytest.approx(quad_mean, rel=1e-10)
    w = d.sample_etbfry(sigma, t, tau, stream(7), size=1_000_000)
    mean, band = mc_band(w)
    assert abs(mean - closed) < band


def test_etbfry_gof():
    w = d.sample_etbfry(0.3, 1.5, 0.7, stream(8), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.etbfry_pdf(x, 0.3, 1.5, 0.7)) > 0.01


def test_etbfry_large_tau_approaches_gamma():
    sigma, t, tau = 0.4, 1.0, 50.0
    w = d.sample_etbfry(sigma, t, tau, stream(9), size=50_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.etbfry_pdf(x, sigma, t, tau)) > 0.01
    # loosened comparison against the untilted Gamma(1-sigma, tau) limit
    ks_stat = stats.kstest(w, lambda s: stats.gamma.cdf(s, 1.0 - sigma, scale=1.0 / tau)).statistic
    assert ks_stat < 0.05


def test_etbfry_tau_zero_scaled_bfry():
    sigma, t = 0.5, 3.0
    a = d.sample_etbfry(sigma, t, 0.0, stream(10), size=50_000)
    b = d.sample_bfry(sigma, stream(11), size=50_000) / t
    assert stats.ks_2samp(a, b).pvalue > 0.01


# -- gBFRY -----------------------------------------------------------------------


def test_gbfry_kappa_one_reduces_to_bfry():
    w = np.geomspace(1e-3, 1e3, 50)
    np.testing.assert_allclose(d.gbfry_pdf(w, 1.0, 0.37), d.bfry_pdf(w, 0.37), rtol=1e-12)


def test_gbfry_gof():
    w = d.sample_gbfry(2.0, 0.5, stream(12), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.gbfry_pdf(x, 2.0, 0.5)) > 0.01


def test_gbfry_head_probability():
    val = integrate.quad(lambda x: d.gbfry_pdf(x, 2.0, 0.5), 0.0, 1.0, limit=200)[0]
    assert val == pytest.approx(GBFRY_2_HALF_P_LE_1, rel=1e-10)
    w = d.sample_gbfry(2.0, 0.5, stream(13), size=200_000)
    phat = (w <= 1.0).mean()
    se = math.sqrt(phat * (1 - phat) / len(w))
    assert abs(phat - GBFRY_2_HALF_P_LE_1) < 3 * se + 1e-4


# -- etgBFRY ----------------------------------------------------------------------


def test_etgbfry_params_validation():
    with pytest.raises(ValueError):
        d.EtgBfryParams(1.0, 1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        d.EtgBfryParams(2.0, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        d.EtgBfryParams(2.0, 0.5, 1.0, 0.0)


def test_etgbfry_mixture_weights_normalize():
    p = d.EtgBfryParams(2.0, 0.5, 2.0, 1.0)
    weights = d.etgbfry_mixture_weights(p)
    z = math.exp(d.etgbfry_log_norm(p))
    assert weights.sum() / z == pytest.approx(1.0, abs=1e-10)


def test_etgbfry_normalization_against_quadrature():
    p = d.EtgBfryParams(2.0, 0.5, 2.0, 1.0)
    assert integrate_semiaxis(lambda w: d.etgbfry_pdf(w, p)) == pytest.approx(1.0, abs=1e-8)


def test_etgbfry_gof():
    p = d.EtgBfryParams(2.0, 0.5, 2.0, 1.0)
    w = d.sample_etgbfry(p, stream(14), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.etgbfry_pdf(x, p)) > 0.01


def test_etgbfry_small_tau_approaches_scaled_gbfry():
    kappa, sigma, t = 2.0, 0.5, 1.0
    p = d.EtgBfryParams(kappa, sigma, t, 1e-6)
    a = d.sample_etgbfry(p, stream(15), size=20_000)
    b = d.sample_gbfry(kappa, sigma, stream(16), size=20_000) / t
    assert stats.ks_2samp(a, b).pvalue > 0.01


def conjugate_likelihood_pdf(obs, w):
    if isinstance(obs, d.PoissonObs):
        return (obs.lam * w) ** obs.x * np.exp(-obs.lam * w)
    if isinstance(obs, d.GammaObs):
        return w**obs.a * np.exp(-obs.x * w)
    if isinstance(obs, d.NormalObs):
        return np.sqrt(w) * np.exp(-0.5 * w * (obs.x - obs.mu) ** 2)
    if isinstance(obs, d.ParetoObs):
        return w * np.exp(-w * math.log(obs.x / obs.x0))
    raise TypeError(obs)


@pytest.mark.parametrize(
    "obs",
    [
        d.PoissonObs(lam=2.0, x=3.0),
        d.GammaObs(a=1.5, x=0.8),
        d.NormalObs(mu=0.0, x=1.3),
        d.ParetoObs(x0=1.0, x=2.5),
    ],
)
def test_etgbfry_conjugacy_grid_product(obs):
    prior = d.EtgBfryParams(2.0, 0.5, 1.0, 1.0)
    post = d.etgbfry_conjugate_update(prior, obs)
    w = np.geomspace(1e-3, 50.0, 100)
    product = d.etgbfry_pdf(w, prior) * conjugate_likelihood_pdf(obs, w)
    ratio = d.etgbfry_pdf(w, post) / product
    assert ratio.max() / ratio.min() - 1.0 < 1e-8


def test_etgbfry_conjugacy_poisson_arithmetic():
    post = d.etgbfry_conjugate_update(
        d.EtgBfryParams(2.0, 0.5, 1.0, 1.0), d.PoissonObs(lam=2.0, x=3.0)
    )
    assert post == d.EtgBfryParams(2.0, -2.5, 1.0, 3.0)


def test_etgbfry_conjugacy_vacuous_gamma():
    prior = d.EtgBfryParams(2.0, 0.5, 1.0, 1.0)
    assert d.etgbfry_conjugate_update(prior, d.GammaObs(a=0.0, x=0.0)) == prior


def test_etgbfry_negative_sigma_sampler():
    post = d.EtgBfryParams(2.0, -2.5, 1.0, 3.0)
    w = d.sample_etgbfry(post, stream(17), size=20_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.etgbfry_pdf(x, post)) > 0.01


# -- igBFRY / etigBFRY --------------------------------------------------------------


def test_igbfry_gof():
    w = d.sample_igbfry(1.0, 0.5, stream(18), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.igbfry_pdf(x, 1.0, 0.5)) > 0.01


def test_igbfry_reciprocal_mean():
    val = integrate.quad(lambda x: d.igbfry_pdf(x, 1.0, 0.5) / x, 0, np.inf, limit=300)[0]
    assert val == pytest.approx(IGBFRY_1_HALF_RECIP_MEAN, rel=1e-8)
    w = d.sample_igbfry(1.0, 0.5, stream(19), size=400_000)
    mean, band = mc_band(1.0 / w)
    assert abs(mean - IGBFRY_1_HALF_RECIP_MEAN) < band


def test_igbfry_reciprocal_density_identity():
    # V = 1/W has density igbfry_pdf(1/v) / v^2 = sigma v^{sigma-1} Gamma(kappa, v)/Gamma(kappa+sigma)
    kappa, sigma = 1.4, 0.6
    v = np.geomspace(1e-3, 1e2, 60)
    from scipy import special

    lhs = d.igbfry_pdf(1.0 / v, kappa, sigma) / v**2
    rhs = (
        sigma
        * v ** (sigma - 1.0)
        * special.gammaincc(kappa, v)
        * math.gamma(kappa)
        / math.gamma(kappa + sigma)
    )
    np.testing.assert_allclose(lhs, rhs, rtol=1e-11)


def test_etigbfry_tau_zero_equals_scaled_igbfry():
    t = 2.0
    a, rate = d.sample_etigbfry(1.0, 0.4, t, 0.0, d.RngStream(99), size=1024, return_acceptance=True)
    assert rate == 1.0  # untilted: every proposal accepted
    b = d.sample_igbfry(1.0, 0.4, d.RngStream(98), size=20_000) / t
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_etigbfry_gof():
    w = d.sample_etigbfry(1.0, 0.4, 1.0, 1.0, stream(20), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.etigbfry_pdf(x, 1.0, 0.4, 1.0, 1.0)) > 0.01


def test_etigbfry_acceptance_rate_matches_quadrature():
    kappa, sigma, t, tau = 1.0, 0.4, 1.0, 1.0
    # acceptance = int e^{-tau w} q(w) dw with q the scaled igBFRY proposal
    proposal = lambda w: d.igbfry_pdf(t * w, kappa, sigma) * t
    expected = integrate.quad(lambda w: math.exp(-tau * w) * proposal(w), 0, np.inf, limit=300)[0]
    _, rate = d.sample_etigbfry(kappa, sigma, t, tau, stream(21), size=30_000, return_acceptance=True)
    assert rate == pytest.approx(expected, abs=0.02)


def test_etigbfry_normalization_is_quadrature_only():
    val = d.etigbfry_norm_constant(1.0, 0.4, 1.0, 1.0)
    direct = integrate.quad(
        lambda w: d.etigbfry_pdf_unnorm(w, 1.0, 0.4, 1.0, 1.0), 0, np.inf, limit=300
    )[0]
    assert val == pytest.approx(direct, rel=1e-8)


# -- GIG -------------------------------------------------------------------------


def test_gig_gof():
    w = d.sample_gig(-1.4, 2.0, 2.0, stream(22), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.gig_pdf(x, -1.4, 2.0, 2.0)) > 0.01


def test_gig_half_negative_order_cdf():
    # p = -1/2 gives an inverse-Gaussian-type law; cdf checked against quadrature
    w = d.sample_gig(-0.5, 3.0, 1.5, stream(23), size=30_000)
    assert ks_pvalue_against_pdf(w, lambda x: d.gig_pdf(x, -0.5, 3.0, 1.5)) > 0.01


def test_gig_small_b_limits_to_gamma():
    p, a = 1.8, 2.0
    w = d.sample_gig(p, a, 1e-8, stream(24), size=30_000)
    assert stats.kstest(w, lambda s: stats.gamma.cdf(s, p, scale=2.0 / a)).pvalue > 0.01


def test_gig_domain():
    with pytest.raises(ValueError):
        d.sample_gig(0.5, -1.0, 1.0, stream())
    with pytest.raises(ValueError):
        d.gig_pdf(1.0, 0.5, 1.0, 0.0)


# -- density normalization sweep ---------------------------------------------------


@pytest.mark.parametrize(
    "pdf",
    [
        lambda w: d.bfry_pdf(w, 0.3),
        lambda w: d.bfry_pdf(w, 0.7),
        lambda w: d.etbfry_pdf(w, 0.5, 2.0, 1.0),
        lambda w: d.gbfry_pdf(w, 2.0, 0.5),
        lambda w: d.etgbfry_pdf(w, d.EtgBfryParams(2.0, 0.5, 2.0, 1.0)),
        lambda w: d.igbfry_pdf(w, 1.0, 0.5),
        lambda w: d.etigbfry_pdf(w, 1.0, 0.4, 1.0, 1.0),
        lambda w: d.gig_pdf(w, -1.4, 2.0, 2.0),
    ],
    ids=["bfry03", "bfry07", "etbfry", "gbfry", "etgbfry", "igbfry", "etigbfry", "gig"],
)
def test_densities_normalize(pdf):
    from crmsim.special_math import Tolerance

    val = integrate_semiaxis(lambda w: pdf(w), tol=Tolerance(rel=1e-9, abs=1e-12))
    assert val == pytest.approx(1.0, abs=1e-8)
