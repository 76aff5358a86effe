import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from rfs.evaluator import evaluate, l2_norm, sup_norm
from rfs.rng import RngStream
from rfs.sampler import (CosineSum, SignPattern, constant_sum, cos_vanishes, forced_sign_sum,
                         sample_sum, sign_predictor, targeted_sum, urn_signs)
from rfs.spectrum import band

B = band(0.01)


def pooled(n_draws, b=B, seed=0):
    return np.concatenate([sample_sum(b, RngStream(seed, i)).coefficients for i in range(n_draws)])


def test_sample_deterministic():
    a = sample_sum(B, RngStream(5, 9)).coefficients
    b = sample_sum(B, RngStream(5, 9)).coefficients
    assert np.array_equal(a, b)


def test_sample_moments_and_normality():
    c = pooled(10 ** 5 // 11 + 1)
    assert abs(c.mean()) <= 0.02
    assert 0.98 <= c.var() <= 1.02
    assert stats.kstest(c, "norm").pvalue > 1e-3


def test_expected_l2_squared():
    sq = [l2_norm(sample_sum(B, RngStream(1, i))) ** 2 for i in range(10 ** 4)]
    assert np.mean(sq) == pytest.approx(11, abs=0.5)


def test_coefficient_count_checked():
    with pytest.raises(ValueError):
        CosineSum(B, np.ones(3))
    with pytest.raises(ValueError):
        SignPattern([1, 0, -1])


def test_forced_extremes():
    s, p = forced_sign_sum(B, B.size, RngStream(0))
    assert np.all(s.coefficients > 0) and p.positive_count == B.size
    s, p = forced_sign_sum(B, 0, RngStream(0))
    assert np.all(s.coefficients < 0) and p.positive_count == 0
    for m in (-1, B.size + 1):
        with pytest.raises(ValueError):
            forced_sign_sum(B, m, RngStream(0))


def test_urn_marginals():
    counts = np.zeros(11)
    n = 10 ** 4
    for i in range(n):
        counts += urn_signs(11, 5, RngStream(2, i)) > 0
    assert np.all(np.abs(counts / n - 5 / 11) <= 0.02)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.data())
def test_urn_count_exact(n, data):
    m = data.draw(st.integers(0, n))
    s = urn_signs(n, m, RngStream(data.draw(st.integers(0, 2 ** 32))))
    assert set(np.unique(s)) <= {-1, 1}
    assert int(np.sum(s > 0)) == m


def test_forced_magnitudes_are_the_normals():
    s, p = forced_sign_sum(B, 4, RngStream(11, 2))
    z = RngStream(11, 2).normals(B.size)
    assert np.array_equal(np.abs(s.coefficients), np.abs(z))
    assert np.array_equal(np.sign(s.coefficients), p.signs)


def test_forced_symmetry_in_distribution():
    sup_m = [sup_norm(forced_sign_sum(B, 3, RngStream(3, i))[0])[0] for i in range(400)]
    sup_c = [sup_norm(forced_sign_sum(B, 8, RngStream(4, i))[0])[0] for i in range(400)]
    assert stats.ks_2samp(sup_m, sup_c).pvalue > 1e-3


def test_sign_predictor_examples():
    assert sign_predictor(1, 0.1) == (-1, 1)
    assert sign_predictor(1, 0.6) == (0, -1)
    assert sign_predictor(2, 0.25)[1] == 1
    assert cos_vanishes(2, 0.25)
    assert not cos_vanishes(2, 0.26)


def test_sign_predictor_agrees_with_cosine():
    rng = np.random.default_rng(0)
    ks = rng.integers(1, 3000, 10 ** 6)
    xs = rng.random(10 ** 6)
    c = np.cos(ks * math.pi * xs)
    keep = np.abs(c) > 1e-12
    ell = np.floor((2.0 * ks * xs - 1.0) / 2.0)
    gamma = np.where(ell % 2 == 1, 1, -1)
    assert np.array_equal(gamma[keep] > 0, c[keep] > 0)
    # scalar path on a subsample
    for k, x in zip(ks[:2000], xs[:2000]):
        ck = math.cos(k * math.pi * x)
        if abs(ck) > 1e-12:
            assert (sign_predictor(int(k), float(x))[1] > 0) == (ck > 0)


def test_targeted_at_origin_is_forced():
    a, _ = targeted_sum(B, 0.0, 6, RngStream(8))
    b, _ = forced_sign_sum(B, 6, RngStream(8))
    assert np.array_equal(a.coefficients, b.coefficients)


def test_targeted_at_one_alternates():
    s, _ = targeted_sum(B, 1.0, B.size, RngStream(8))
    expect = np.where(np.array(list(B.wavenumbers)) % 2 == 0, 1, -1)
    assert np.array_equal(np.sign(s.coefficients), expect)


def _targeted_ratios(b, x_hat, trials=100):
    out = []
    for i in range(trials):
        s, _ = targeted_sum(b, x_hat, b.size, RngStream(6, i))
        out.append(evaluate(s, [x_hat])[0] / l2_norm(s))
    return np.array(out)


def test_targeted_value_matches_oracle():
    b = band(10 ** -2.5)
    x_hat = 2 / math.pi
    r = _targeted_ratios(b, x_hat)
    ks = np.array(list(b.wavenumbers))
    # E|c| = sqrt(2/pi) per mode; l2 concentrates at sqrt(|band|)
    oracle = math.sqrt(2) * math.sqrt(2 / math.pi) * np.abs(np.cos(ks * math.pi * x_hat)).sum() / math.sqrt(b.size)
    assert np.all(r > 0)
    assert r.mean() == pytest.approx(oracle, rel=0.05)


@pytest.mark.xfail(strict=True, reason="synced sum reaches about half the worst case, not 0.7 of it")
def test_targeted_value_versus_worst_case():
    b = band(10 ** -2.5)
    r = _targeted_ratios(b, 2 / math.pi)
    assert np.all(r >= 0.7 * math.sqrt(2 * b.size))


def test_constant_sum():
    s = constant_sum(B, 2.0)
    assert np.all(s.coefficients == 2.0)
    assert np.all((-s).coefficients == -2.0)
