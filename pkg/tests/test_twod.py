import math

import numpy as np
import pytest
from scipy import stats

from rfs import twod
from rfs.rng import RngStream
from rfs.twod import (CosineSum2D, TwoDConfig, band_2d, evaluate_2d, grid_2d, grid_2d_naive,
                      grid_extrema_count, l2_norm_2d, model_draw_2d, ratio_experiment_2d,
                      sample_sum_2d, sup_norm_2d)

B2 = band_2d(1e-2)


def test_size_near_asymptotic():
    assert B2.asymptotic_size() == pytest.approx(355.9, abs=0.1)
    assert abs(B2.size - B2.asymptotic_size()) <= 0.25 * B2.asymptotic_size()


def test_radii_and_no_axis_modes():
    r = np.hypot(*B2.modes.T)
    assert np.all((r >= 17) & (r <= 27))
    assert np.all(B2.modes >= 1)


def test_lattice_count_by_brute_force():
    k, l = np.meshgrid(np.arange(1, 28), np.arange(1, 28))
    rr = k * k + l * l
    assert B2.size == int(np.sum((rr >= 17 ** 2) & (rr <= 27 ** 2)))


def test_band_symmetric_under_swap():
    a = {tuple(m) for m in B2.modes}
    assert a == {(l, k) for k, l in a}


def test_empty_band_rejected():
    with pytest.raises(ValueError):
        band_2d(0.1)


def test_sample_moments():
    c = np.concatenate([sample_sum_2d(B2, RngStream(0, i)).coefficients for i in range(300)])
    assert c.size >= 10 ** 5
    assert c.var() == pytest.approx(1.0, abs=0.02)
    a = sample_sum_2d(B2, RngStream(3, 3)).coefficients
    assert np.array_equal(a, sample_sum_2d(B2, RngStream(3, 3)).coefficients)


def test_expected_square_integral():
    # each mode integrates to 1/4 over the square
    sq = [l2_norm_2d(sample_sum_2d(B2, RngStream(1, i))) ** 2 for i in range(2000)]
    assert np.mean(sq) == pytest.approx(B2.size / 4, rel=0.05)


def test_l2_norm_equals_quadrature():
    b = band_2d(10 ** -1.5)
    s = sample_sum_2d(b, RngStream(2))
    g = np.linspace(0, 1, 401)
    f = grid_2d(s, g, g)
    quad = np.trapezoid(np.trapezoid(f * f, g, axis=1), g)
    assert quad == pytest.approx(l2_norm_2d(s) ** 2, rel=1e-6)


def test_separable_equals_naive():
    b = band_2d(10 ** -1.5)
    s = sample_sum_2d(b, RngStream(4))
    g = np.linspace(0, 1, 23)
    fast, slow = grid_2d(s, g, g), grid_2d_naive(s, g, g)
    assert np.max(np.abs(fast - slow)) <= 1e-10 * np.max(np.abs(slow))
    xx, yy = np.meshgrid(g, g, indexing="ij")
    assert np.allclose(evaluate_2d(s, xx, yy), slow, atol=1e-12)


def test_single_mode_and_positive_sums():
    c = np.zeros(B2.size)
    c[5] = 1.0
    v, (x, y) = sup_norm_2d(CosineSum2D(B2, c))
    assert v == pytest.approx(1.0) and (x, y) == (0.0, 0.0)
    c = np.abs(sample_sum_2d(B2, RngStream(5)).coefficients)
    v, (x, y) = sup_norm_2d(CosineSum2D(B2, c))
    assert (x, y) == (0.0, 0.0) and v == pytest.approx(c.sum(), rel=1e-12)


def test_sup_oversample_guard():
    with pytest.raises(ValueError):
        sup_norm_2d(sample_sum_2d(B2, RngStream(0)), 4)


def test_extrema_count_bounded():
    for i in range(3):
        assert grid_extrema_count(sample_sum_2d(B2, RngStream(6, i))) <= 27 ** 2


def test_swap_symmetry_in_distribution():
    rng = np.random.default_rng(0)
    pts = rng.random((10 ** 4, 2))
    a, b = [], []
    for i in range(100):
        s = sample_sum_2d(B2, RngStream(7, i))
        p = pts[i * 100:(i + 1) * 100]
        a.append(evaluate_2d(s, p[:, 0], p[:, 1]))
        b.append(evaluate_2d(s, p[:, 1], p[:, 0]))
    assert stats.ks_2samp(np.concatenate(a), np.concatenate(b)).pvalue > 1e-3


def test_model_draw_2d_moments():
    d = model_draw_2d(B2, RngStream(8))
    assert d.y.size == twod.model_extrema_count_2d(B2) == 484
    assert d.l2 == pytest.approx(0.5 * math.sqrt(B2.size)) and d.peak_scale == 1.0
    ys = np.concatenate([model_draw_2d(B2, RngStream(8, i)).y for i in range(200)])
    var = B2.size * (twod.evmodel.TERM_MEAN_2D ** 2 + twod.evmodel.TERM_VAR_2D)
    assert ys.mean() == pytest.approx(0.0, abs=0.05 * math.sqrt(var))
    assert ys.var() == pytest.approx(var, rel=0.05)


def test_ratio_experiment_guard():
    with pytest.raises(ValueError):
        ratio_experiment_2d(TwoDConfig(epsilons=(5e-3,)))


def test_ratio_below_cauchy_schwarz_bound():
    res = ratio_experiment_2d(TwoDConfig(epsilons=(10 ** -1.5,), trials=100))
    size = band_2d(10 ** -1.5).size
    assert np.all(res.values("real_ratio") <= 2 * math.sqrt(size) * (1 + 1e-12))


def test_exceedance_nonincreasing():
    eps = (10 ** -1.25, 10 ** -1.5, 1e-2)
    res = ratio_experiment_2d(TwoDConfig(epsilons=eps, trials=100))
    f = [res.values("model_exceed", e).mean() for e in eps]
    assert f[0] >= f[1] >= f[2]


@pytest.mark.xfail(strict=True, reason="corner and edge maxima lift real 2-D ratios well above the model")
def test_model_median_close_to_real():
    res = ratio_experiment_2d(TwoDConfig(epsilons=(10 ** -1.5,), trials=100))
    real, model = np.median(res.values("real_ratio")), np.median(res.values("model_ratio"))
    assert abs(model - real) / real <= 0.25
