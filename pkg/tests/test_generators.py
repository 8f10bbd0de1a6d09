import numpy as np
import pytest
from scipy import stats

from mfdecomp.generators import DistributionSpec, binomial_cascade, fgn, fgn_autocovariance, sample

N_BIG = 10**6


@pytest.mark.parametrize("kw", [
    {"family": "cauchy"},
    {"family": "double_weibull", "beta": 0.0},
    {"family": "double_weibull", "beta": 1.2},
    {"family": "student_t", "gamma": 2.0},
])
def test_invalid_specs(kw):
    with pytest.raises(ValueError):
        DistributionSpec(**kw)


@pytest.mark.parametrize("dist", [
    DistributionSpec("gaussian"), DistributionSpec("laplace"),
    DistributionSpec("double_weibull", beta=0.5), DistributionSpec("student_t", gamma=4),
])
def test_sampling_deterministic(dist):
    a = sample(dist, 1000, 5)
    assert np.array_equal(a, sample(dist, 1000, 5))
    assert not np.array_equal(a, sample(dist, 1000, 6))


def test_sample_rejects_empty():
    with pytest.raises(ValueError):
        sample(DistributionSpec("gaussian"), 0, 1)


def test_double_weibull_beta_one_moments():
    x = sample(DistributionSpec("double_weibull", beta=1.0), N_BIG, 11)
    se_mean = np.sqrt(2.0 / N_BIG)  # Laplace(0, 1) variance is 2
    se_abs = np.sqrt(1.0 / N_BIG)  # |x| ~ Exp(1)
    assert abs(x.mean()) < 3 * se_mean
    assert abs(np.abs(x).mean() - 1.0) < 3 * se_abs


def test_double_weibull_location():
    x = sample(DistributionSpec("double_weibull", beta=0.7, mu=3.0), 10**5, 2)
    assert np.median(x) == pytest.approx(3.0, abs=0.05)


def test_student_variance():
    x = sample(DistributionSpec("student_t", gamma=3.0), N_BIG, 12)
    assert x.var() == pytest.approx(3.0, rel=0.10)


def test_gaussian_ks():
    n = 10**5
    x = sample(DistributionSpec("gaussian"), n, 13)
    assert stats.kstest(x, "norm").statistic < 1.63 / np.sqrt(n)


def test_weibull_beta_one_is_laplace():
    n = 10**5
    a = sample(DistributionSpec("double_weibull", beta=1.0), n, 21)
    b = sample(DistributionSpec("laplace"), n, 22)
    d_crit = 1.63 * np.sqrt(2.0 / n)
    assert stats.ks_2samp(a, b).statistic < d_crit


@pytest.mark.parametrize("dist", [DistributionSpec("double_weibull", beta=0.6),
                                  DistributionSpec("student_t", gamma=7.0)])
def test_symmetric_skewness(dist):
    x = sample(dist, N_BIG, 31)
    # standard error of the skewness from 100 batch estimates (heavy tails inflate sqrt(6/n))
    se = np.std(stats.skew(x.reshape(100, -1), axis=1), ddof=1) / np.sqrt(100)
    assert abs(stats.skew(x)) < 3 * se


def test_comonotone_across_shapes():
    a = sample(DistributionSpec("student_t", gamma=3), 2000, 9)
    b = sample(DistributionSpec("student_t", gamma=8), 2000, 9)
    assert np.array_equal(np.argsort(a), np.argsort(b))


# -- cascade -----------------------------------------------------------------

def test_cascade_normalized():
    c = binomial_cascade(0.3, 15)
    assert len(c.values) == 2**15
    assert c.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_cascade_uniform_case():
    c = binomial_cascade(0.5, 8)
    q = np.array([-5, -1, 1, 2, 5.0])
    np.testing.assert_allclose(c.values, 2.0**-8)
    np.testing.assert_allclose(c.h(q), 1.0, atol=1e-12)


def test_cascade_h2_value():
    c = binomial_cascade(0.3, 4)
    assert float(c.h(2.0)) == pytest.approx(0.5 - np.log2(0.58) / 2, abs=1e-12)
    assert float(c.h(2.0)) == pytest.approx(0.893, abs=5e-4)


def test_cascade_spectrum_identities():
    c = binomial_cascade(0.3, 4)
    q = np.linspace(-5, 5, 41)
    assert float(c.f(0.0)) == pytest.approx(1.0)
    np.testing.assert_allclose(c.alpha(q), np.gradient(c.tau(q), q), atol=2e-2)


@pytest.mark.parametrize("p, levels", [(0.0, 5), (1.0, 5), (0.3, 21), (0.3, 0)])
def test_cascade_invalid(p, levels):
    with pytest.raises(ValueError):
        binomial_cascade(p, levels)


# -- fGn ---------------------------------------------------------------------

def test_fgn_white_at_half():
    n = 2**15
    x = fgn(0.5, n, 3)
    assert abs(np.corrcoef(x[:-1], x[1:])[0, 1]) < 3 / np.sqrt(n)


@pytest.mark.parametrize("H", [0.3, 0.6, 0.8])
def test_fgn_unit_variance(H):
    assert fgn(H, 2**15, 4).var() == pytest.approx(1.0, rel=0.05)


def test_fgn_lag_one_correlation():
    H = 0.8
    rho = np.mean([np.corrcoef(x[:-1], x[1:])[0, 1] for x in (fgn(H, 2**14, k) for k in range(8))])
    assert rho == pytest.approx(fgn_autocovariance(H, 2)[1], abs=0.02)


def test_fgn_deterministic():
    assert np.array_equal(fgn(0.7, 1024, 1), fgn(0.7, 1024, 1))


@pytest.mark.parametrize("H, n", [(0.0, 1024), (1.0, 1024), (0.5, 1000)])
def test_fgn_invalid(H, n):
    with pytest.raises(ValueError):
        fgn(H, n, 0)
