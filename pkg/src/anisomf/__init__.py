"""Anisotropic Minkowski functionals and fractional-anisotropy maps for 2D images."""

from .anisotropy import (AnisotropyMaps, EigenPair, anisotropy_for_functional,
                         fractional_anisotropy, mirror_points, pca2)
from .engine import (AmfField, amf_at_pixel, compute_amf_field,
                     default_thresholds, threshold_image, weighted_counts)
from .kernels import (KernelBank, OrientedKernel, flat_kernel,
                      make_kernel_bank, make_skewed_gaussian)
from .morphometry import (CellCounts, MfTriple, count_cells, euler_oracle,
                          image_minkowski, minkowski_functionals,
                          perimeter_oracle)
from .pipeline import AnalysisConfig, analyze_image, extract_feature_bundles, synthetic_cohort
from .regression import (BmdCalibration, CvConfig, RegressionModel,
                         SpecimenRecord, compare_feature_sets, cross_validate,
                         fit_multiregression, hu_to_bmd, mean_bmd, rmse)
from .stats import (Histogram, TestResult, direction_histogram, fa_histogram,
                    near_isotropic_fraction, standardize, welch_t_test,
                    wilcoxon_signed_rank)

__version__ = "0.1.0"
