"""BMD calibration, multilinear regression and the cross-validation harness.

Fits use the minimum-norm least-squares solution from an orthogonal
factorization (numpy lstsq), so duplicated or collinear feature columns
still give well-defined predictions.  Cross-validation is repeated random
sub-sampling with per-repetition seeds derived from (seed, repetition), so
serial and parallel runs agree bitwise.
"""

from dataclasses import dataclass, field

import numpy as np

from .stats import TestResult, wilcoxon_signed_rank


@dataclass(frozen=True)
class BmdCalibration:
    """Linear HU -> BMD map fixed by the two calibration phantom phases."""

    hu_w: float
    hu_b: float
    ha_w: float = 0.0
    ha_b: float = 200.0

    def __post_init__(self):
        if self.hu_b == self.hu_w:
            raise ValueError("calibration phases must have distinct HU values")


def hu_to_bmd(hu, cal: BmdCalibration):
    """BMD in mg/cm^3 from Hounsfield units via the phantom calibration line."""
    slope = (cal.ha_b - cal.ha_w) / (cal.hu_b - cal.hu_w)
    return cal.ha_w + slope * (np.asarray(hu, dtype=float) - cal.hu_w)


def mean_bmd(gray, mask, cal: BmdCalibration) -> float:
    """Mean BMD over masked pixels of an HU image."""
    g = np.asarray(gray, dtype=float)
    m = np.asarray(mask, dtype=bool)
    if m.shape != g.shape:
        raise ValueError("mask dimensions must match the image")
    if not m.any():
        raise ValueError("empty ROI mask")
    return float(hu_to_bmd(g[m], cal).mean())


@dataclass(frozen=True)
class SpecimenRecord:
    id: str
    features: dict          # bundle name -> 1D feature vector
    failure_load: float


@dataclass(frozen=True)
class RegressionModel:
    intercept: float
    coefficients: np.ndarray = field(repr=False)

    def predict(self, X) -> np.ndarray:
        return self.intercept + np.asarray(X, dtype=float) @ self.coefficients


def fit_multiregression(X, y) -> RegressionModel:
    """Least-squares fit with intercept; minimum-norm on rank deficiency."""
    A = np.atleast_2d(np.asarray(X, dtype=float))
    if A.shape[0] == 1 and np.asarray(y).size > 1:
        A = A.T
    t = np.asarray(y, dtype=float)
    if A.shape[0] != t.size:
        raise ValueError("feature matrix and targets disagree in length")
    if A.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit")
    design = np.column_stack([np.ones(A.shape[0]), A])
    beta, *_ = np.linalg.lstsq(design, t, rcond=None)
    return RegressionModel(intercept=float(beta[0]), coefficients=beta[1:])


def rmse(model: RegressionModel, X, y) -> float:
    t = np.asarray(y, dtype=float)
    r = t - model.predict(np.atleast_2d(np.asarray(X, dtype=float)).reshape(t.size, -1))
    return float(np.sqrt(np.mean(r**2)))


@dataclass(frozen=True)
class CvConfig:
    train_fraction: float = 2.0 / 3.0
    repetitions: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train fraction must be in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")


def _splits(n: int, cfg: CvConfig):
    n_train = int(round(cfg.train_fraction * n))
    if n_train < 2 or n - n_train < 1:
        raise ValueError("degenerate split: need >=2 train and >=1 test samples")
    for rep in range(cfg.repetitions):
        rng = np.random.default_rng([cfg.seed, rep])
        perm = rng.permutation(n)
        yield perm[:n_train], perm[n_train:]


def feature_matrix(records, selector: str) -> np.ndarray:
    rows = []
    for rec in records:
        if selector not in rec.features:
            raise KeyError(f"record {rec.id} has no feature bundle {selector!r}")
        rows.append(np.asarray(rec.features[selector], dtype=float).ravel())
    return np.vstack(rows)


def cross_validate(records, selector: str, cfg: CvConfig) -> np.ndarray:
    """RMSE of each repeated random-subsampling repetition, seeded."""
    if len(records) < 4:
        raise ValueError("need at least 4 records")
    X = feature_matrix(records, selector)
    y = np.asarray([r.failure_load for r in records], dtype=float)
    out = np.empty(cfg.repetitions)
    for i, (train, test) in enumerate(_splits(len(records), cfg)):
        model = fit_multiregression(X[train], y[train])
        out[i] = rmse(model, X[test], y[test])
    return out


def compare_feature_sets(records, selector_a: str, selector_b: str,
                         cfg: CvConfig) -> TestResult:
    """Paired Wilcoxon on RMSE sequences from identical splits."""
    ra = cross_validate(records, selector_a, cfg)
    rb = cross_validate(records, selector_b, cfg)
    return wilcoxon_signed_rank(ra, rb)
