"""Histogram features over ROI masks and the two statistical tests.

Welch's two-sample t-test gets its two-sided p-value from the regularized
incomplete beta function; the Wilcoxon signed-rank test uses the
tie-corrected normal approximation on midranks (zero differences dropped,
no continuity correction).
"""

from dataclasses import dataclass

import numpy as np
from scipy import special, stats as _spstats

from .anisotropy import FA_CUTOFF_DEFAULT, AnisotropyMaps

FA_HIST_BINS_DEFAULT = 50
DIRECTION_HIST_BINS_DEFAULT = 18


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        n = self.total
        if n == 0:
            return np.zeros(len(self.counts))
        return self.counts / n

    @property
    def empty(self) -> bool:
        return self.total == 0


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n: tuple


def _check_mask(maps: AnisotropyMaps, mask):
    if mask is None:
        return np.ones(maps.fa_map.shape, dtype=bool)
    m = np.asarray(mask, dtype=bool)
    if m.shape != maps.fa_map.shape:
        raise ValueError("mask dimensions must match the map")
    return m


def fa_histogram(maps: AnisotropyMaps, mask=None,
                 nbins: int = FA_HIST_BINS_DEFAULT) -> Histogram:
    """Histogram of FA values of masked pixels over the fixed range [0, 1]."""
    if nbins < 2:
        raise ValueError("need at least 2 bins")
    m = _check_mask(maps, mask)
    if not m.any():
        raise ValueError("empty ROI mask")
    counts, edges = np.histogram(maps.fa_map[m], bins=nbins, range=(0.0, 1.0))
    return Histogram(bin_edges=edges, counts=counts)


def near_isotropic_fraction(maps: AnisotropyMaps, mask=None,
                            cutoff: float = FA_CUTOFF_DEFAULT) -> float:
    """Fraction of masked pixels with FA at or below the isotropy cutoff."""
    m = _check_mask(maps, mask)
    if not m.any():
        raise ValueError("empty ROI mask")
    return float((maps.fa_map[m] <= cutoff).mean())


def direction_histogram(maps: AnisotropyMaps, mask=None,
                        nbins: int = DIRECTION_HIST_BINS_DEFAULT,
                        fa_cutoff: float = None) -> Histogram:
    """Histogram over [0, 180) of angles of oriented masked pixels.

    Pixels with FA at or below the cutoff carry no direction and are
    excluded; with no oriented pixel the histogram is empty, not an error.
    """
    if nbins < 2:
        raise ValueError("need at least 2 bins")
    cutoff = maps.fa_cutoff if fa_cutoff is None else fa_cutoff
    m = _check_mask(maps, mask) & (maps.fa_map > cutoff)
    angles = maps.angle_map[m]
    angles = angles[np.isfinite(angles)]
    counts, edges = np.histogram(angles, bins=nbins, range=(0.0, 180.0))
    return Histogram(bin_edges=edges, counts=counts)


def standardize(values) -> np.ndarray:
    """Shift/scale to zero mean and unit sample (n-1) standard deviation."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least 2 values to standardize")
    sd = v.std(ddof=1)
    if sd == 0:
        raise ValueError("degenerate distribution: zero variance")
    return (v - v.mean()) / sd


def welch_t_test(a, b) -> TestResult:
    """Welch's unequal-variance t-test, two-sided.

    p comes from the regularized incomplete beta function at the
    Welch-Satterthwaite degrees of freedom.  With zero variance in both
    samples the means are compared exactly.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size < 2 or y.size < 2:
        raise ValueError("each sample needs at least 2 values")
    vx, vy = x.var(ddof=1), y.var(ddof=1)
    nx, ny = x.size, y.size
    se2 = vx / nx + vy / ny
    if se2 == 0:
        if x.mean() == y.mean():
            return TestResult(0.0, 1.0, (nx, ny))
        return TestResult(np.inf if x.mean() > y.mean() else -np.inf, 0.0, (nx, ny))
    t = (x.mean() - y.mean()) / np.sqrt(se2)
    df = se2**2 / ((vx / nx)**2 / (nx - 1) + (vy / ny)**2 / (ny - 1))
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TestResult(float(t), min(max(p, 0.0), 1.0), (nx, ny))


def wilcoxon_signed_rank(a, b) -> TestResult:
    """Paired Wilcoxon signed-rank test, two-sided normal approximation.

    Zero differences are dropped; ties get midranks with the usual variance
    correction.  Requires at least 6 nonzero differences.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape:
        raise ValueError("paired samples must have equal length")
    d = x - y
    d = d[d != 0]
    if d.size == 0:
        raise ValueError("no signal: all paired differences are zero")
    n = d.size
    if n < 6:
        raise ValueError("sample too small for the normal approximation")
    ranks = _spstats.rankdata(np.abs(d))
    w_plus = ranks[d > 0].sum()
    w_minus = ranks[d < 0].sum()
    w = min(w_plus, w_minus)
    mean_w = n * (n + 1) / 4.0
    var_w = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var_w -= ((tie_counts**3 - tie_counts) / 48.0).sum()
    if var_w <= 0:
        raise ValueError("degenerate rank variance")
    z = (w - mean_w) / np.sqrt(var_w)
    p = float(min(1.0, 2.0 * special.ndtr(z)))
    return TestResult(float(w), p, (n,))
