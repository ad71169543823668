import numpy as np
import pytest

from anisomf.anisotropy import AnisotropyMaps
from anisomf.stats import (direction_histogram, fa_histogram,
                           near_isotropic_fraction, standardize, welch_t_test,
                           wilcoxon_signed_rank)


def maps_from(fa, angle=None, cutoff=0.03):
    fa = np.asarray(fa, dtype=float)
    if angle is None:
        angle = np.full(fa.shape, np.nan)
    angle = np.asarray(angle, dtype=float)
    angle = np.where(fa > cutoff, angle, np.nan)
    return AnisotropyMaps(fa_map=fa, angle_map=angle,
                          source_threshold_map=np.zeros(fa.shape, dtype=int),
                          fa_cutoff=cutoff)


def test_fa_histogram_background_in_first_bin():
    h = fa_histogram(maps_from(np.zeros((4, 4))), nbins=10)
    assert h.counts[0] == 16
    assert h.counts[1:].sum() == 0
    assert h.frequencies.sum() == pytest.approx(1.0)


def test_fa_histogram_single_value_two_bins():
    m = maps_from([[0.5]])
    h = fa_histogram(m, nbins=2)
    assert list(h.counts) == [0, 1]


def test_fa_histogram_mask_and_errors():
    m = maps_from(np.linspace(0, 0.9, 16).reshape(4, 4))
    mask = np.zeros((4, 4), dtype=bool)
    mask[0] = True
    assert fa_histogram(m, mask, nbins=5).total == 4
    with pytest.raises(ValueError):
        fa_histogram(m, np.zeros((4, 4), dtype=bool))
    with pytest.raises(ValueError):
        fa_histogram(m, nbins=1)
    with pytest.raises(ValueError):
        fa_histogram(m, np.zeros((3, 3), dtype=bool))


def test_near_isotropic_fraction():
    m = maps_from([[0.0, 0.02, 0.03, 0.5]])
    assert near_isotropic_fraction(m) == pytest.approx(0.75)


def test_direction_histogram_single_pixel():
    fa = np.zeros((3, 3))
    ang = np.zeros((3, 3))
    fa[1, 1] = 0.5
    ang[1, 1] = 60.0
    h = direction_histogram(maps_from(fa, ang), nbins=18)
    assert h.total == 1
    assert h.counts[6] == 1  # bin [60, 70)


def test_direction_histogram_empty_is_flagged_not_error():
    h = direction_histogram(maps_from(np.zeros((3, 3))), nbins=18)
    assert h.empty
    assert h.frequencies.sum() == 0.0


def test_histogram_mass_conservation():
    rng = np.random.default_rng(3)
    fa = rng.uniform(0, 1, (8, 8))
    ang = rng.uniform(0, 180, (8, 8))
    m = maps_from(fa, ang)
    fh = fa_histogram(m, nbins=13)
    assert fh.total == 64
    dh = direction_histogram(m, nbins=7)
    assert dh.total == int((fa > 0.03).sum())
    assert dh.frequencies.sum() == pytest.approx(1.0)


def test_standardize_basic_and_idempotent():
    out = standardize([1.0, 2.0, 3.0])
    assert np.allclose(out, [-1, 0, 1], atol=1e-12)
    again = standardize(out)
    assert np.allclose(again, out, atol=1e-12)
    assert abs(out.mean()) < 1e-12
    assert out.std(ddof=1) == pytest.approx(1.0, abs=1e-12)


def test_standardize_errors():
    with pytest.raises(ValueError):
        standardize([5.0])
    with pytest.raises(ValueError, match="degenerate"):
        standardize([2.0, 2.0, 2.0])


def test_welch_identical_samples():
    r = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.statistic == 0.0
    assert r.p_value == pytest.approx(1.0)


def test_welch_separated_samples():
    r = welch_t_test([0.0, 0.0, 0.0, 0.0], [10.0, 10.0, 10.0, 10.0001])
    assert r.p_value < 1e-6


def test_welch_degenerate_variance():
    r = welch_t_test([1.0, 1.0], [1.0, 1.0])
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    r = welch_t_test([1.0, 1.0], [2.0, 2.0])
    assert r.p_value == 0.0


def test_welch_symmetry():
    rng = np.random.default_rng(8)
    a = rng.normal(0, 1, 30)
    b = rng.normal(0.5, 2, 20)
    r1 = welch_t_test(a, b)
    r2 = welch_t_test(b, a)
    assert r1.statistic == pytest.approx(-r2.statistic, abs=0)
    assert r1.p_value == r2.p_value


def test_welch_null_calibration():
    rng = np.random.default_rng(12)
    low = 0
    for _ in range(1000):
        a = rng.normal(0, 1, 50)
        b = rng.normal(0, 1, 50)
        if welch_t_test(a, b).p_value <= 0.001:
            low += 1
    assert low <= 10  # p > 0.001 in >= 99% of null trials


def test_welch_matches_scipy():
    from scipy import stats as sp
    rng = np.random.default_rng(4)
    for _ in range(50):
        a = rng.normal(0, 1, rng.integers(5, 40))
        b = rng.normal(0.3, 2, rng.integers(5, 40))
        r = welch_t_test(a, b)
        ref = sp.ttest_ind(a, b, equal_var=False)
        assert r.statistic == pytest.approx(ref.statistic, rel=1e-10)
        assert r.p_value == pytest.approx(ref.pvalue, rel=1e-8)


def test_wilcoxon_constant_shift():
    a = np.arange(20, dtype=float)
    r = wilcoxon_signed_rank(a + 5.0, a)
    assert r.statistic == 0.0
    assert r.p_value < 0.001


def test_wilcoxon_null_noise():
    rng = np.random.default_rng(5)
    high = 0
    for _ in range(200):
        a = rng.normal(0, 1, 30)
        b = a + rng.normal(0, 1, 30)
        if wilcoxon_signed_rank(a, b).p_value > 0.05:
            high += 1
    assert high > 150


def test_wilcoxon_errors():
    a = np.arange(10, dtype=float)
    with pytest.raises(ValueError, match="no signal"):
        wilcoxon_signed_rank(a, a)
    with pytest.raises(ValueError, match="too small"):
        wilcoxon_signed_rank([1.0, 2, 3, 4], [2.0, 3, 4, 5])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2], [1.0])


def test_wilcoxon_monotone_transform_invariance():
    rng = np.random.default_rng(6)
    a = rng.normal(0, 1, 25)
    b = rng.normal(0.2, 1, 25)
    r1 = wilcoxon_signed_rank(a, b)
    # strictly monotone map of the differences preserves signs and ranks
    d = a - b
    d2 = np.sign(d) * np.expm1(np.abs(d))
    r2 = wilcoxon_signed_rank(d2, np.zeros_like(d2))
    assert r1.statistic == r2.statistic
    assert r1.p_value == pytest.approx(r2.p_value, abs=1e-12)


def test_wilcoxon_matches_scipy_approx():
    from scipy import stats as sp
    rng = np.random.default_rng(7)
    a = rng.normal(0, 1, 40)
    b = a + rng.normal(0.3, 0.7, 40)
    r = wilcoxon_signed_rank(a, b)
    ref = sp.wilcoxon(a, b, correction=False, mode="approx")
    assert r.statistic == pytest.approx(ref.statistic)
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-8)
