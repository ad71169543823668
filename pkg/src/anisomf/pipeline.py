"""End-to-end analysis wiring: gray image -> field -> maps -> features.

This is the shared layer behind the CLI, the HTTP service and the cohort
builder.  Feature bundles mirror the compared feature vectors: the mean
intensity / mean BMD baseline, FA and direction histograms per functional,
and global isotropic Minkowski statistics per threshold.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import phantoms
from .anisotropy import FA_CUTOFF_DEFAULT, anisotropy_for_functional
from .engine import (FUNCTIONALS, compute_amf_field, default_thresholds,
                     threshold_image)
from .kernels import make_kernel_bank
from .morphometry import image_minkowski
from .regression import SpecimenRecord
from .stats import (direction_histogram, fa_histogram, near_isotropic_fraction)

AMF_BUNDLES = ("fa:area", "fa:perimeter", "fa:euler",
               "angle:area", "angle:perimeter", "angle:euler")
ALL_BUNDLES = ("bmd",) + AMF_BUNDLES + ("iso-mf",)


@dataclass(frozen=True)
class AnalysisConfig:
    kernel_size: int = 5
    sigma_major: float = 2.0
    sigma_minor: float = 0.5
    n_thresholds: int = 10
    thresholds: tuple = None       # explicit list overrides n_thresholds
    fa_cutoff: float = FA_CUTOFF_DEFAULT
    fa_bins: int = 50
    direction_bins: int = 18

    def bank(self):
        return make_kernel_bank(self.kernel_size, self.sigma_major,
                                self.sigma_minor)

    def threshold_list(self, gray):
        if self.thresholds is not None:
            return [float(t) for t in self.thresholds]
        return default_thresholds(gray, self.n_thresholds)


@dataclass
class AnalysisResult:
    config: AnalysisConfig
    thresholds: tuple
    maps: dict              # functional -> AnisotropyMaps
    fa_hist: dict           # functional -> Histogram
    direction_hist: dict    # functional -> Histogram
    near_isotropic: dict    # functional -> float


def analyze_image(gray, config: AnalysisConfig = AnalysisConfig(),
                  mask=None, parallel: bool = False) -> AnalysisResult:
    """Full anisotropy analysis of one gray image over an optional ROI mask."""
    g = np.asarray(gray, dtype=float)
    ts = config.threshold_list(g)
    field = compute_amf_field(g, ts, config.bank(), parallel=parallel)
    maps, fh, dh, iso = {}, {}, {}, {}
    for f in FUNCTIONALS:
        m = anisotropy_for_functional(field, f, config.fa_cutoff)
        maps[f] = m
        fh[f] = fa_histogram(m, mask, config.fa_bins)
        dh[f] = direction_histogram(m, mask, config.direction_bins)
        iso[f] = near_isotropic_fraction(m, mask, config.fa_cutoff)
    return AnalysisResult(config=config, thresholds=field.thresholds,
                          maps=maps, fa_hist=fh, direction_hist=dh,
                          near_isotropic=iso)


def iso_mf_features(gray, thresholds) -> np.ndarray:
    """Global Minkowski triple per threshold, normalized by pixel count."""
    g = np.asarray(gray, dtype=float)
    npix = g.size
    feats = []
    for t in thresholds:
        mf = image_minkowski(threshold_image(g, t))
        feats.extend([mf.area / npix, mf.perimeter / npix, mf.euler / npix])
    return np.asarray(feats)


def extract_feature_bundles(gray, config: AnalysisConfig, mask=None,
                            fa_bins: int = 8, direction_bins: int = 9) -> dict:
    """Named feature vectors for the regression harness.

    Histogram bundles use coarser binning than the reporting histograms so
    feature counts stay below cohort-scale sample sizes.
    """
    cfg = replace(config, fa_bins=fa_bins, direction_bins=direction_bins)
    res = analyze_image(gray, cfg, mask=mask)
    g = np.asarray(gray, dtype=float)
    mean_val = g[np.asarray(mask, dtype=bool)].mean() if mask is not None else g.mean()
    bundles = {"bmd": np.asarray([mean_val])}
    for f in FUNCTIONALS:
        bundles[f"fa:{f}"] = res.fa_hist[f].frequencies
        bundles[f"angle:{f}"] = res.direction_hist[f].frequencies
    bundles["iso-mf"] = iso_mf_features(g, res.thresholds)
    return bundles


def synthetic_cohort(spec: phantoms.CohortSpec,
                     config: AnalysisConfig = None) -> list:
    """Cohort of specimen records with all feature bundles computed.

    Each record also carries the true coherence under the "coherence"
    bundle, for calibration tests.
    """
    if config is None:
        config = AnalysisConfig(n_thresholds=6)
    records = []
    for i in range(spec.n_specimens):
        g, c, load = phantoms.cohort_member(spec, i)
        features = extract_feature_bundles(g, config)
        features["coherence"] = np.asarray([c])
        records.append(SpecimenRecord(id=f"s{i:03d}", features=features,
                                      failure_load=load))
    return records
