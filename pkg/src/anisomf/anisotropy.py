"""Fractional anisotropy and principal direction from directional magnitudes.

The four directional magnitudes are placed at their angles in the plane and
mirrored through the origin, giving eight points whose centroid is exactly
zero.  The 2x2 second-moment matrix of that octet is diagonalized in closed
form; FA = |l1 - l2| / sqrt(l1^2 + l2^2) and the principal direction is the
axial angle of the dominant eigenvector in [0, 180).
"""

import math
from dataclasses import dataclass

import numpy as np

from .engine import FUNCTIONALS, AmfField

FA_CUTOFF_DEFAULT = 0.03

# second-moment matrix of the mirrored octet is
#   S = (1/4) * sum_theta m_theta^2 * [[cos^2, cos sin], [cos sin, sin^2]]
_ANGLES_RAD = np.radians([0.0, 45.0, 90.0, 135.0])
_COS2 = np.cos(_ANGLES_RAD) ** 2
_SIN2 = np.sin(_ANGLES_RAD) ** 2
_COSSIN = np.cos(_ANGLES_RAD) * np.sin(_ANGLES_RAD)


@dataclass(frozen=True)
class EigenPair:
    lambda1: float
    lambda2: float
    principal_angle: float  # degrees in [0, 180)


def mirror_points(m0, m45, m90, m135) -> np.ndarray:
    """Eight 2D points: each magnitude at its angle, plus the mirror image."""
    mags = np.asarray([m0, m45, m90, m135], dtype=float)
    pts = np.column_stack([mags * np.cos(_ANGLES_RAD), mags * np.sin(_ANGLES_RAD)])
    return np.vstack([pts, -pts])


def pca2(points) -> EigenPair:
    """Closed-form eigen-decomposition of the octet's second-moment matrix."""
    p = np.asarray(points, dtype=float)
    s = (p[:, None, :] * p[:, :, None]).sum(axis=0) / len(p)
    sxx, syy, sxy = s[0, 0], s[1, 1], s[0, 1]
    tr = sxx + syy
    disc = math.hypot(sxx - syy, 2.0 * sxy)
    l1 = (tr + disc) / 2.0
    l2 = (tr - disc) / 2.0
    angle = math.degrees(0.5 * math.atan2(2.0 * sxy, sxx - syy)) % 180.0
    if angle == 180.0:  # (-eps) % 180 can round up to the open endpoint
        angle = 0.0
    return EigenPair(lambda1=l1, lambda2=max(l2, 0.0), principal_angle=angle)


def fractional_anisotropy(e: EigenPair) -> float:
    """FA in [0, 1]; 0 for the degenerate all-zero matrix."""
    norm = math.hypot(e.lambda1, e.lambda2)
    if norm == 0.0:
        return 0.0
    return abs(e.lambda1 - e.lambda2) / norm


def anisotropy_from_magnitudes(m0, m45, m90, m135):
    """(fa, angle_degrees) for one magnitude quadruple."""
    e = pca2(mirror_points(m0, m45, m90, m135))
    return fractional_anisotropy(e), e.principal_angle


def _plane_fa_angle(mags: np.ndarray):
    """Vectorized FA/angle for an (H, W, 4) magnitude array."""
    m2 = mags.astype(float) ** 2
    sxx = (m2 * _COS2).sum(axis=-1) / 4.0
    syy = (m2 * _SIN2).sum(axis=-1) / 4.0
    sxy = (m2 * _COSSIN).sum(axis=-1) / 4.0
    tr = sxx + syy
    disc = np.hypot(sxx - syy, 2.0 * sxy)
    l1 = (tr + disc) / 2.0
    l2 = (tr - disc) / 2.0
    norm = np.hypot(l1, l2)
    fa = np.zeros_like(tr)
    nz = norm > 0
    fa[nz] = np.abs(l1[nz] - l2[nz]) / norm[nz]
    angle = np.degrees(0.5 * np.arctan2(2.0 * sxy, sxx - syy)) % 180.0
    angle[angle == 180.0] = 0.0  # (-eps) % 180 can round up to 180
    return fa, angle


@dataclass
class AnisotropyMaps:
    """Per-pixel max-FA aggregate across thresholds for one functional."""

    fa_map: np.ndarray                 # (H, W) float, 0 on background
    angle_map: np.ndarray              # (H, W) float, NaN where unoriented
    source_threshold_map: np.ndarray   # (H, W) int, -1 where never white
    fa_cutoff: float

    @property
    def oriented(self) -> np.ndarray:
        return self.fa_map > self.fa_cutoff


def anisotropy_for_functional(field: AmfField, functional: str,
                              fa_cutoff: float = FA_CUTOFF_DEFAULT) -> AnisotropyMaps:
    """Max-FA aggregation across thresholds for one functional.

    Each pixel gets the maximum FA over the thresholds at which it is white,
    with the angle from that same threshold; ties go to the lowest threshold
    index.  Pixels never white keep FA 0.  Pixels at or below the cutoff are
    left unoriented (angle NaN).
    """
    f = FUNCTIONALS.index(functional)
    h, w = field.shape
    fa_map = np.zeros((h, w))
    angle_map = np.full((h, w), np.nan)
    src = np.full((h, w), -1, dtype=int)
    seen = np.zeros((h, w), dtype=bool)
    for i, (mask, values) in enumerate(zip(field.masks, field.values)):
        fa, angle = _plane_fa_angle(values[:, :, f, :])
        better = mask & (~seen | (fa > fa_map))
        fa_map[better] = fa[better]
        angle_map[better] = angle[better]
        src[better] = i
        seen |= mask
    below = ~(fa_map > fa_cutoff)
    angle_map[below] = np.nan
    return AnisotropyMaps(fa_map=fa_map, angle_map=angle_map,
                         source_threshold_map=src, fa_cutoff=fa_cutoff)
