import math

import numpy as np
import pytest
from scipy import integrate, special

from crmsim.special_math import (
    BracketError,
    QuadratureError,
    Tolerance,
    bessel_k,
    incomplete_beta,
    integrate_semiaxis,
    invert_increasing,
    log_gamma,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)

# frozen oracle values; the generating oracles live next to each test
LIG_2p5_1p7 = 0.48046359872081645  # 120-term ascending series
UIG_M0p5_2 = 0.030098757100186078  # adaptive quadrature of the defining integral
UIG_M0p7_50 = 2.4141708425163939e-25
UIG_M1p3_0p4 = 1.1152224617234141
INCBETA_0p6_2_M0p4 = 0.40188303537284281  # 400-term hypergeometric series
BESSELK_1p3_0p7 = 1.4232613423144329  # cosh-integral quadrature


def test_log_gamma_values():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)
    assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-13)
    np.testing.assert_allclose(log_gamma(np.array([1.0, 0.5])), [0.0, 0.5723649429247001], atol=1e-12)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(-1.5)


def test_lower_incomplete_gamma_exponential_case():
    x = np.linspace(0.1, 8.0, 17)
    np.testing.assert_allclose(lower_incomplete_gamma(1.0, x), 1.0 - np.exp(-x), rtol=1e-12)


def test_lower_incomplete_gamma_at_zero():
    assert lower_incomplete_gamma(3.3, 0.0) == 0.0


def test_lower_incomplete_gamma_series_oracle():
    # oracle: gamma(a,x) = x^a e^{-x} sum_j x^j Gamma(a)/Gamma(a+j+1)
    a, x = 2.5, 1.7
    term, val = 1.0 / a, 0.0
    for j in range(120):
        val += term
        term *= x / (a + j + 1.0)
    assert x**a * math.exp(-x) * val == pytest.approx(LIG_2p5_1p7, rel=1e-14)
    assert lower_incomplete_gamma(a, x) == pytest.approx(LIG_2p5_1p7, rel=1e-12)
    assert lower_incomplete_gamma(a, x, regularized=True) == pytest.approx(
        LIG_2p5_1p7 / math.gamma(a), rel=1e-12
    )


def test_lower_incomplete_gamma_domain():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(-1.0, 2.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, -0.1)


def test_upper_incomplete_gamma_exponential_case():
    x = np.linspace(0.05, 10.0, 13)
    np.testing.assert_allclose(upper_incomplete_gamma(1.0, x), np.exp(-x), rtol=1e-12)


def test_upper_incomplete_complementarity():
    for a in (0.3, 1.0, 2.7, 6.5):
        for x in (0.1, 1.0, 4.0, 20.0):
            total = lower_incomplete_gamma(a, x) + upper_incomplete_gamma(a, x)
            assert total == pytest.approx(math.gamma(a), rel=1e-10)


def test_upper_incomplete_gamma_negative_a():
    # oracle: direct adaptive quadrature of the defining integral
    val = integrate.quad(lambda u: u**-1.5 * np.exp(-u), 2.0, np.inf, limit=400)[0]
    assert val == pytest.approx(UIG_M0p5_2, rel=1e-9)
    assert upper_incomplete_gamma(-0.5, 2.0) == pytest.approx(UIG_M0p5_2, rel=1e-10)
    assert upper_incomplete_gamma(-0.7, 50.0) == pytest.approx(UIG_M0p7_50, rel=1e-10)
    assert upper_incomplete_gamma(-1.3, 0.4) == pytest.approx(UIG_M1p3_0p4, rel=1e-10)


def test_upper_incomplete_gamma_vectorized():
    x = np.geomspace(0.01, 80.0, 50)
    vec = upper_incomplete_gamma(-0.5, x)
    for xi, vi in zip(x, vec):
        assert vi == pytest.approx(upper_incomplete_gamma(-0.5, float(xi)), rel=1e-12)


def test_upper_incomplete_gamma_domain():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(0.5, 0.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-0.5, -1.0)


def test_incomplete_beta_trivial():
    for x in (0.2, 0.5, 0.9):
        assert incomplete_beta(x, 1.0, 1.0) == pytest.approx(x, rel=1e-12)
    assert incomplete_beta(0.5, 2.0, 1.0) == pytest.approx(0.125, rel=1e-12)


def test_incomplete_beta_negative_b():
    # oracle: series B_x(a,b) = sum_j (1-b)_j / (j! (a+j)) x^{a+j}
    x, a, b = 0.6, 2.0, -0.4
    s, poch = 0.0, 1.0
    for j in range(400):
        s += poch / (a + j) * x ** (a + j)
        poch *= (1.0 - b + j) / (j + 1.0)
    assert s == pytest.approx(INCBETA_0p6_2_M0p4, rel=1e-14)
    assert incomplete_beta(x, a, b) == pytest.approx(INCBETA_0p6_2_M0p4, rel=1e-10)


def test_incomplete_beta_domain():
    with pytest.raises(ValueError):
        incomplete_beta(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        incomplete_beta(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        incomplete_beta(0.5, -1.0, 1.0)


def test_bessel_k_half_integer():
    x = np.linspace(0.2, 6.0, 13)
    expected = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x)
    np.testing.assert_allclose(bessel_k(0.5, x), expected, rtol=1e-12)


def test_bessel_k_symmetry():
    for nu in (0.3, 1.3, 2.8):
        for x in (0.4, 1.7, 9.0):
            assert bessel_k(-nu, x) == pytest.approx(bessel_k(nu, x), rel=1e-12)


def test_bessel_k_integral_oracle():
    val = integrate.quad(lambda t: np.exp(-0.7 * np.cosh(t)) * np.cosh(1.3 * t), 0, 30, limit=400)[0]
    assert val == pytest.approx(BESSELK_1p3_0p7, rel=1e-11)
    assert bessel_k(1.3, 0.7) == pytest.approx(BESSELK_1p3_0p7, rel=1e-10)


def test_bessel_k_errors():
    with pytest.raises(ValueError):
        bessel_k(0.5, 0.0)
    with pytest.raises(OverflowError):
        bessel_k(200.0, 1e-6)


def test_integrate_semiaxis_basic():
    assert integrate_semiaxis(lambda x: math.exp(-x)) == pytest.approx(1.0, rel=1e-10)
    assert integrate_semiaxis(lambda x: x**-0.5 * math.exp(-x)) == pytest.approx(
        math.sqrt(math.pi), rel=1e-10
    )


def test_integrate_semiaxis_matches_closed_laplace_exponent():
    # int Lambda_w(t) rho(dw) for the tilted process under a gamma kernel
    alpha, sigma, tau, kappa = 2.0, 0.4, 1.0, 2.0
    eta = alpha * kappa**sigma * math.gamma(kappa - sigma) / (
        math.gamma(kappa) * math.gamma(1.0 - sigma)
    )
    coef = alpha * tau**sigma * math.gamma(kappa - sigma) / (
        math.gamma(kappa) * math.gamma(1.0 - sigma)
    )
    for t in (0.1, 1.0, 10.0):
        x = kappa * t / (kappa * t + tau)
        closed = coef * incomplete_beta(x, kappa, -sigma)
        rho = lambda w: alpha / math.gamma(1.0 - sigma) * w ** (-1.0 - sigma) * math.exp(-tau * w)
        lam = lambda w: special.gammainc(kappa, kappa * w * t)
        est = integrate_semiaxis(lambda w: lam(w) * rho(w), singularity_scale=min(1.0, 1.0 / t))
        assert est == pytest.approx(closed, rel=1e-8)


def test_integrate_semiaxis_failure_reports_estimate():
    # wildly oscillatory integrand the adaptive rule cannot certify
    with pytest.raises(QuadratureError) as err:
        integrate_semiaxis(lambda x: math.sin(x * x) * x, tol=Tolerance(rel=1e-13, abs=1e-16))
    assert hasattr(err.value, "estimate")
    assert err.value.error_bound > 0


def test_invert_increasing_trivial():
    assert invert_increasing(lambda x: x, 3.0, 1.0) == pytest.approx(3.0, rel=1e-12)
    assert invert_increasing(lambda x: x * x, 4.0, 0.1) == pytest.approx(2.0, rel=1e-12)


def test_invert_increasing_roundtrip_laplace_exponent():
    alpha, sigma, tau = 2.0, 0.5, 1.0
    psi = lambda t: (alpha / sigma) * ((t + tau) ** sigma - tau**sigma)
    y = psi(5.0)
    assert invert_increasing(psi, y, 1.0) == pytest.approx(5.0, rel=1e-10)
    for t in np.geomspace(1e-3, 1e3, 13):
        root = invert_increasing(psi, psi(t), max(t * 3.7, 1e-4))
        assert root == pytest.approx(t, rel=1e-8)


def test_invert_increasing_bracket_failure():
    with pytest.raises(BracketError):
        invert_increasing(lambda x: min(x, 1.0), 2.0, 1.0, Tolerance(rel=1e-8, abs=0, max_iter=20))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel=0.0)
    with pytest.raises(ValueError):
        Tolerance(abs=-1.0)
    with pytest.raises(ValueError):
        Tolerance(max_iter=0)
