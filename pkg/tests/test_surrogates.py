import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mfdecomp.dfa import DfaConfig, generalized_hurst, log_scale_grid
from mfdecomp.generators import DistributionSpec, fgn, sample
from mfdecomp.series import ReturnSeries
from mfdecomp.spectrum import spectrum_from_h
from mfdecomp.surrogates import (SurrogateSpec, apply, iaaft, rank_remap, shuffle, spectral_error,
                                 truncate)

seeds = st.integers(0, 2**32 - 1)
lengths = st.integers(16, 1024)


def random_series(seed, n):
    rng = np.random.default_rng(seed)
    kind = seed % 3
    if kind == 0:
        x = rng.standard_normal(n)
    elif kind == 1:
        x = rng.standard_t(3, n)
    else:
        x = np.cumsum(rng.standard_normal(n)) * 0.1 + rng.laplace(size=n)
    return ReturnSeries(x)


# -- spec ----------------------------------------------------------------------

@pytest.mark.parametrize("kind, params", [
    ("bootstrap", {}), ("truncate", {"M": 0}), ("iaaft", {"iterations": 0}), ("rank_remap", {}),
])
def test_invalid_surrogate_spec(kind, params):
    with pytest.raises(ValueError):
        SurrogateSpec(kind, params)


# -- shuffle -------------------------------------------------------------------

@given(seeds, lengths)
def test_shuffle_is_permutation(seed, n):
    r = random_series(seed, n)
    out = shuffle(r, seed)
    assert np.array_equal(np.sort(out.values), np.sort(r.values))
    assert out.mean == r.mean and out.std == r.std
    assert np.array_equal(out.values, shuffle(r, seed).values)


def test_shuffle_changes_order():
    r = ReturnSeries(np.arange(100.0))
    assert not np.array_equal(shuffle(r, 1).values, r.values)


# -- truncate -------------------------------------------------------------------

def test_truncate_noop_threshold():
    r = random_series(4, 500)
    M = np.abs(r.values).max() / r.std + 1
    out, count = truncate(r, M, 0)
    assert count == 0 and np.array_equal(out.values, r.values)


def test_truncate_hand_case():
    r = ReturnSeries([0.0, 0.0, 0.0, 100.0])
    # sigma = 50, threshold 25
    out, count = truncate(r, 0.5, 3)
    assert count == 1
    assert list(out.values) == [0.0, 0.0, 0.0, 0.0]


def test_truncate_rejects_empty_pool():
    r = ReturnSeries([-1.0, 1.0, -1.0, 1.0])
    with pytest.raises(ValueError):
        truncate(r, 0.5, 0)


@given(seeds, lengths, st.floats(0.5, 5.0))
def test_truncate_properties(seed, n, M):
    r = random_series(seed, n)
    out, count = truncate(r, M, seed)
    thresh = M * r.std
    assert out.length == r.length
    assert np.abs(out.values).max() <= thresh
    untouched = np.abs(r.values) <= thresh
    assert np.array_equal(out.values[untouched], r.values[untouched])
    assert count == int((~untouched).sum())
    assert set(out.values[~untouched]) <= set(r.values[untouched])
    assert out.std <= r.std * (1 + 1e-12)


# -- rank remap -----------------------------------------------------------------

def test_rank_remap_bookkeeping():
    r = ReturnSeries([3.0, 1.0, 2.0])
    out = rank_remap(r, [10.0, 30.0, 20.0])
    # pre-rescale x = (30, 10, 20), then moved to mean 2 and std 1
    np.testing.assert_allclose(out.values, [3.0, 1.0, 2.0], atol=1e-12)


def test_rank_remap_identity():
    r = random_series(6, 400)
    out = rank_remap(r, np.random.default_rng(0).permutation(r.values))
    np.testing.assert_allclose(out.values, r.values, atol=1e-9)


def test_rank_remap_length_mismatch():
    with pytest.raises(ValueError):
        rank_remap(ReturnSeries([1.0, 2.0, 3.0]), [1.0, 2.0])


@given(seeds, lengths)
def test_rank_remap_properties(seed, n):
    r = random_series(seed, n)
    raw = sample(DistributionSpec("double_weibull", beta=0.5), n, seed)
    out = rank_remap(r, raw)
    assert stats.spearmanr(out.values, r.values)[0] == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(np.argsort(out.values, kind="stable"), np.argsort(r.values, kind="stable"))
    assert out.mean == pytest.approx(r.mean, abs=1e-9 * max(1.0, r.std))
    assert out.std == pytest.approx(r.std, rel=1e-9)


def test_rank_remap_ties_broken_by_position():
    r = ReturnSeries([1.0, 0.0, 1.0, 1.0])
    out = rank_remap(r, [4.0, 1.0, 2.0, 3.0])
    assert out.values[1] < out.values[0] < out.values[2] < out.values[3]


# -- IAAFT ------------------------------------------------------------------------

@given(seeds, lengths)
@settings(max_examples=50)
def test_iaaft_preserves_values(seed, n):
    r = random_series(seed, n)
    out, trace = iaaft(r, 5, seed)
    assert np.array_equal(np.sort(out.values), np.sort(r.values))
    assert len(trace) == 5
    assert np.array_equal(out.values, iaaft(r, 5, seed)[0].values)


def test_iaaft_constant_series():
    r = ReturnSeries(np.full(64, 0.25))
    out, trace = iaaft(r, 1, 0)
    assert np.array_equal(out.values, r.values)
    assert trace[0] == 0


def test_iaaft_preconditions():
    with pytest.raises(ValueError):
        iaaft(ReturnSeries([1.0, 2.0, 3.0]), 5, 0)
    with pytest.raises(ValueError):
        iaaft(ReturnSeries(np.arange(8.0)), 0, 0)


def test_iaaft_trace_decreases():
    r = ReturnSeries(fgn(0.7, 4096, 1))
    out, trace = iaaft(r, 20, 2)
    assert np.all(np.diff(trace) <= 1e-6)
    assert trace[-1] < trace[0]
    assert spectral_error(out.values, np.abs(np.fft.rfft(r.values)) ** 2) == pytest.approx(trace[-1])


def test_iaaft_keeps_linear_correlation():
    r = ReturnSeries(fgn(0.8, 4096, 5))
    out, _ = iaaft(r, 20, 6)
    rho = lambda x: np.corrcoef(x[:-1], x[1:])[0, 1]
    assert rho(out.values) == pytest.approx(rho(r.values), abs=0.03)
    assert abs(rho(shuffle(r, 6).values)) < 0.05


# -- dispatch -----------------------------------------------------------------------

@pytest.mark.parametrize("spec", [
    SurrogateSpec("shuffle"), SurrogateSpec("truncate", {"M": 2.0}),
    SurrogateSpec("rank_remap", {"dist": DistributionSpec("student_t", gamma=3)}),
    SurrogateSpec("iaaft", {"iterations": 3}),
])
def test_apply_length_and_determinism(spec):
    r = random_series(7, 300)
    a = apply(r, spec, [1, 2])
    assert a.length == r.length
    assert np.array_equal(a.values, apply(r, spec, [1, 2]).values)


@pytest.mark.slow
def test_shuffled_iid_width_within_band():
    cfg = DfaConfig(s_grid=log_scale_grid(20, 800, 15), n_boxes=500, seed=1)
    r = ReturnSeries(np.random.default_rng(5).standard_normal(8192))
    width = lambda x: spectrum_from_h(generalized_hurst(x, cfg)).width
    shuf = np.array([width(shuffle(r, [3, i])) for i in range(8)])
    fresh = np.array([width(ReturnSeries(np.random.default_rng([4, i]).standard_normal(8192)))
                      for i in range(8)])
    band = 3 * np.hypot(shuf.std(), fresh.std())
    assert abs(shuf.mean() - fresh.mean()) <= band
    assert abs(width(r) - shuf.mean()) <= 3 * shuf.std() + band
