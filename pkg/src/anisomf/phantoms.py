"""Deterministic synthetic images and cohorts for verifying the pipeline.

Stripe phantoms are sinusoidal gratings with a known orientation; blob
phantoms are smoothed white noise with no preferred direction.  The cohort
generator mixes the two with a per-specimen coherence that drives a linear
failure load, while holding mean intensity constant so the intensity
baseline is deliberately weak.  All randomness flows through numpy's
seeded PCG64 generator; per-member streams derive from (seed, index).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# failure load model: load = LOAD_OFFSET + LOAD_SLOPE * coherence + noise
LOAD_OFFSET = 500.0
LOAD_SLOPE = 1000.0


def failure_load(coherence: float) -> float:
    """Noise-free failure load of a specimen with the given coherence."""
    return LOAD_OFFSET + LOAD_SLOPE * coherence

_EXACT_TRIG = {
    0.0: (1.0, 0.0), 45.0: (math.sqrt(0.5), math.sqrt(0.5)),
    90.0: (0.0, 1.0), 135.0: (-math.sqrt(0.5), math.sqrt(0.5)),
}


@dataclass(frozen=True)
class PhantomSpec:
    width: int
    height: int
    kind: str                  # "stripes" or "blobs"
    angle: float = 0.0         # stripes only, degrees
    period: float = 8.0
    contrast: float = 100.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("phantom dimensions must be positive")
        if self.kind not in ("stripes", "blobs"):
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if self.period < 2:
            raise ValueError("period must be >= 2 pixels")
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be non-negative")


def _trig(angle_deg: float):
    a = angle_deg % 180.0
    if a in _EXACT_TRIG:
        return _EXACT_TRIG[a]
    rad = math.radians(angle_deg)
    return math.cos(rad), math.sin(rad)


def stripe_phantom(spec: PhantomSpec) -> np.ndarray:
    """Sinusoidal grating elongated along `angle` (y down, CCW from +x)."""
    if spec.kind != "stripes":
        raise ValueError("spec.kind must be 'stripes'")
    c, s = _trig(spec.angle)
    y, x = np.mgrid[0:spec.height, 0:spec.width].astype(float)
    phase = 2.0 * np.pi * (x * s - y * c) / spec.period
    g = spec.contrast * (0.5 + 0.5 * np.cos(phase))
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        g = g + rng.normal(0.0, spec.noise_sigma, g.shape)
    return g


def blob_phantom(spec: PhantomSpec) -> np.ndarray:
    """Isotropic control: white noise smoothed at radius period/2."""
    if spec.kind != "blobs":
        raise ValueError("spec.kind must be 'blobs'")
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal((spec.height, spec.width))
    smooth = ndimage.gaussian_filter(noise, sigma=spec.period / 2.0, mode="wrap")
    sd = smooth.std()
    if sd > 0:
        smooth = (smooth - smooth.mean()) / sd
    g = spec.contrast * (0.5 + 0.25 * smooth)
    if spec.noise_sigma > 0:
        g = g + rng.normal(0.0, spec.noise_sigma, g.shape)
    return g


def make_phantom(spec: PhantomSpec) -> np.ndarray:
    if spec.kind == "stripes":
        return stripe_phantom(spec)
    return blob_phantom(spec)


@dataclass(frozen=True)
class CohortSpec:
    n_specimens: int = 60
    coherence_range: tuple = (0.0, 1.0)
    noise_sigma_load: float = 50.0
    seed: int = 0
    width: int = 64
    height: int = 64
    stripe_angle: float = 60.0
    period: float = 8.0
    contrast: float = 100.0

    def __post_init__(self):
        if self.n_specimens < 10:
            raise ValueError("cohort needs at least 10 specimens")
        lo, hi = self.coherence_range
        if not (0.0 <= lo < hi <= 1.0):
            raise ValueError("coherence range must be a subinterval of [0, 1]")


def cohort_member(spec: CohortSpec, index: int):
    """(gray image, coherence, failure load) of one cohort specimen.

    The image is a coherence-weighted mix of a stripe and a blob phantom
    re-centered to a fixed mean, so mean intensity carries no load signal.
    """
    rng = np.random.default_rng([spec.seed, index])
    lo, hi = spec.coherence_range
    c = float(rng.uniform(lo, hi))
    stripe = stripe_phantom(PhantomSpec(
        spec.width, spec.height, "stripes", angle=spec.stripe_angle,
        period=spec.period, contrast=spec.contrast))
    blob = blob_phantom(PhantomSpec(
        spec.width, spec.height, "blobs", period=spec.period,
        contrast=spec.contrast, seed=int(rng.integers(2**31))))
    g = c * stripe + (1.0 - c) * blob
    g = g - g.mean() + spec.contrast / 2.0
    load = failure_load(c)
    if spec.noise_sigma_load > 0:
        load += float(rng.normal(0.0, spec.noise_sigma_load))
    return g, c, load
