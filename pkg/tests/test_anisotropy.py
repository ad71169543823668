import numpy as np
import pytest

from anisomf.anisotropy import (AnisotropyMaps, anisotropy_for_functional,
                                anisotropy_from_magnitudes,
                                fractional_anisotropy, mirror_points, pca2)
from anisomf.engine import compute_amf_field, default_thresholds
from anisomf.kernels import make_kernel_bank
from anisomf.phantoms import PhantomSpec, stripe_phantom


def brute_eigenvalues(points):
    """Characteristic-polynomial solve of the 2x2 second-moment matrix."""
    p = np.asarray(points, dtype=float)
    s = p.T @ p / len(p)
    tr = s[0, 0] + s[1, 1]
    det = s[0, 0] * s[1, 1] - s[0, 1] ** 2
    root = np.sqrt(max(tr * tr / 4 - det, 0.0))
    return tr / 2 + root, tr / 2 - root


def test_mirror_points_centroid_and_shape():
    pts = mirror_points(1.5, -2.0, 0.3, 7.0)
    assert pts.shape == (8, 2)
    assert np.allclose(pts.sum(axis=0), 0.0, atol=1e-12)


def test_mirror_points_single_direction():
    pts = mirror_points(1.0, 0.0, 0.0, 0.0)
    assert np.allclose(sorted(pts[:, 0]), [-1, 0, 0, 0, 0, 0, 0, 1])
    assert np.allclose(pts[:, 1], 0.0)


def test_mirror_points_sign_absorbed():
    a = mirror_points(-2.0, 0.0, 1.0, 0.0)
    b = mirror_points(2.0, 0.0, 1.0, 0.0)
    assert np.allclose(np.sort(a, axis=0), np.sort(b, axis=0), atol=1e-12)


def test_pca2_closed_forms():
    e = pca2(mirror_points(1, 0, 0, 0))
    assert e.lambda1 == pytest.approx(0.25, abs=1e-12)
    assert e.lambda2 == pytest.approx(0.0, abs=1e-12)
    assert e.principal_angle == pytest.approx(0.0, abs=1e-9)

    e = pca2(mirror_points(0, 1, 0, 0))
    assert e.lambda1 == pytest.approx(0.25, abs=1e-12)
    assert e.principal_angle == pytest.approx(45.0, abs=1e-9)

    e = pca2(mirror_points(3, 3, 3, 3))
    assert e.lambda1 == pytest.approx(4.5, abs=1e-12)
    assert e.lambda2 == pytest.approx(4.5, abs=1e-12)


def test_pca2_degenerate_zero():
    e = pca2(mirror_points(0, 0, 0, 0))
    assert (e.lambda1, e.lambda2, e.principal_angle) == (0.0, 0.0, 0.0)
    assert fractional_anisotropy(e) == 0.0


def test_pca2_matches_bruteforce_random():
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        pts = mirror_points(*rng.normal(0, 3, size=4))
        e = pca2(pts)
        l1, l2 = brute_eigenvalues(pts)
        assert e.lambda1 == pytest.approx(l1, abs=1e-12)
        assert e.lambda2 == pytest.approx(l2, abs=1e-12)


def test_fa_closed_forms():
    fa, angle = anisotropy_from_magnitudes(2, 0, 1, 0)
    assert fa == pytest.approx(0.727607, abs=1e-6)
    assert angle == pytest.approx(0.0, abs=1e-9)
    fa, _ = anisotropy_from_magnitudes(5, 5, 5, 5)
    assert fa == 0.0
    fa, angle = anisotropy_from_magnitudes(0, 0, 4, 0)
    assert fa == 1.0
    assert angle == pytest.approx(90.0, abs=1e-9)


def test_fa_scale_and_signflip_invariance():
    rng = np.random.default_rng(23)
    for _ in range(300):
        m = rng.normal(0, 2, size=4)
        fa, angle = anisotropy_from_magnitudes(*m)
        for c in (7.3, -1.0, 0.01):
            fa2, angle2 = anisotropy_from_magnitudes(*(c * m))
            assert fa2 == pytest.approx(fa, abs=1e-12)
            if fa > 1e-6:
                assert angle2 == pytest.approx(angle, abs=1e-9)
        flip = m.copy()
        flip[1] = -flip[1]
        fa3, angle3 = anisotropy_from_magnitudes(*flip)
        assert fa3 == pytest.approx(fa, abs=1e-12)
        if fa > 1e-6:
            assert angle3 == pytest.approx(angle, abs=1e-9)


def test_label_rotation_equivariance():
    rng = np.random.default_rng(29)
    for _ in range(200):
        m = rng.normal(0, 2, size=4)
        fa, angle = anisotropy_from_magnitudes(*m)
        shifted = (m[3], m[0], m[1], m[2])
        fa2, angle2 = anisotropy_from_magnitudes(*shifted)
        assert fa2 == pytest.approx(fa, abs=1e-12)
        if fa > 1e-6:
            delta = (angle2 - angle) % 180.0
            assert min(abs(delta - 45.0), abs(delta - 225.0)) < 1e-6


def test_fa_range():
    rng = np.random.default_rng(31)
    for _ in range(2000):
        fa, _ = anisotropy_from_magnitudes(*rng.normal(0, 5, size=4))
        assert 0.0 <= fa <= 1.0 + 1e-15


def _toy_field():
    g = stripe_phantom(PhantomSpec(24, 24, "stripes", angle=0.0, period=6,
                                   contrast=100.0))
    bank = make_kernel_bank()
    return compute_amf_field(g, default_thresholds(g, 4), bank)


def test_maps_background_is_zero_and_unoriented():
    field = _toy_field()
    maps = anisotropy_for_functional(field, "area")
    never_white = ~np.logical_or.reduce(field.masks)
    assert never_white.any()
    assert not maps.fa_map[never_white].any()
    assert np.isnan(maps.angle_map[never_white]).all()
    assert (maps.source_threshold_map[never_white] == -1).all()


def test_max_fa_rule_and_tie_break():
    field = _toy_field()
    maps = anisotropy_for_functional(field, "area")
    from anisomf.anisotropy import _plane_fa_angle
    per_t = [_plane_fa_angle(v[:, :, 0, :])[0] for v in field.values]
    ys, xs = np.nonzero(np.logical_or.reduce(field.masks))
    for y, x in list(zip(ys, xs))[::11]:
        fas = [per_t[i][y, x] for i in range(len(field.masks))
               if field.masks[i][y, x]]
        assert maps.fa_map[y, x] == pytest.approx(max(fas), abs=0)
        # lowest threshold index wins on ties
        idx = maps.source_threshold_map[y, x]
        assert field.masks[idx][y, x]
        assert per_t[idx][y, x] == maps.fa_map[y, x]
        earlier = [i for i in range(idx) if field.masks[i][y, x]]
        for i in earlier:
            assert per_t[i][y, x] < maps.fa_map[y, x]


def test_cutoff_controls_orientation():
    field = _toy_field()
    maps = anisotropy_for_functional(field, "area", fa_cutoff=0.03)
    assert np.isfinite(maps.angle_map[maps.oriented]).all()
    assert np.isnan(maps.angle_map[~maps.oriented]).all()
    strict = anisotropy_for_functional(field, "area", fa_cutoff=1.0)
    assert not strict.oriented.any()
    assert np.isnan(strict.angle_map).all()


def test_stripe_interior_oriented_near_zero_degrees():
    field = _toy_field()
    maps = anisotropy_for_functional(field, "area")
    angles = maps.angle_map[maps.oriented]
    assert angles.size > 50
    dist = np.minimum(angles % 180.0, 180.0 - angles % 180.0)
    assert np.median(dist) < 15.0
