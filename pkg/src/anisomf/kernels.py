"""Oriented skewed-Gaussian kernels and derived pixel/edge/vertex weights.

Each kernel is a peak-normalized anisotropic Gaussian elongated along one of
the four canonical directions 0, 45, 90, 135 degrees.  Coordinates follow the
image display convention: x right, y down, angles counterclockwise from +x.
Weights outside the kernel grid are zero; edge weights average the two
flanking pixel weights (divisor fixed at 2) and vertex weights the four
surrounding pixel weights (divisor fixed at 4).
"""

import math
from dataclasses import dataclass, field

import numpy as np

CANONICAL_ANGLES = (0.0, 45.0, 90.0, 135.0)

# exact direction cosines for the 45-degree-stepped angle set, so that the
# four kernels are bitwise rigid rotations of one another
_S = math.sqrt(0.5)
_EXACT_TRIG = {
    0.0: (1.0, 0.0),
    45.0: (_S, _S),
    90.0: (0.0, 1.0),
    135.0: (-_S, _S),
}


@dataclass(frozen=True)
class OrientedKernel:
    """One oriented weight grid, peak-normalized at the center."""

    angle: float
    size: int
    weights: np.ndarray = field(repr=False)

    @property
    def radius(self) -> int:
        return self.size // 2

    def padded_weights(self, outside: float = 0.0) -> np.ndarray:
        """(size+2)^2 pixel-weight grid with a one-pixel out-of-grid ring.

        The ring value is 0 by contract; tests use outside=1 to realize a
        kernel whose weight is 1 everywhere.
        """
        p = np.full((self.size + 2, self.size + 2), outside, dtype=float)
        p[1:-1, 1:-1] = self.weights
        return p

    def edge_vertex_weights(self, outside: float = 0.0):
        """Edge and vertex weight grids on the window's cell lattices.

        Returns (horiz_edges, vert_edges, vertices) with shapes
        (size+1, size), (size, size+1) and (size+1, size+1).
        """
        p = self.padded_weights(outside)
        horiz = (p[:-1, 1:-1] + p[1:, 1:-1]) / 2.0
        vert = (p[1:-1, :-1] + p[1:-1, 1:]) / 2.0
        vtx = (p[:-1, :-1] + p[:-1, 1:] + p[1:, :-1] + p[1:, 1:]) / 4.0
        return horiz, vert, vtx


def make_skewed_gaussian(size: int, angle: float, sigma_major: float,
                         sigma_minor: float) -> OrientedKernel:
    """Build one oriented kernel.

    Weight at offset (dx, dy) from the center is
    exp(-(u^2 / (2 sM^2) + v^2 / (2 sm^2))) with u, v the offset rotated
    into the kernel frame.
    """
    if size < 3 or size % 2 == 0:
        raise ValueError("kernel size must be odd and >= 3")
    if sigma_major <= 0 or sigma_minor <= 0:
        raise ValueError("kernel sigmas must be positive")
    if angle in _EXACT_TRIG:
        c, s = _EXACT_TRIG[angle]
    else:
        c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))
    r = size // 2
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1].astype(float)
    u = dx * c + dy * s
    v = -dx * s + dy * c
    w = np.exp(-(u**2 / (2 * sigma_major**2) + v**2 / (2 * sigma_minor**2)))
    return OrientedKernel(angle=angle, size=size, weights=w)


@dataclass(frozen=True)
class KernelBank:
    """The four canonical kernels plus the sigmas they were built from."""

    kernels: tuple
    sigma_major: float
    sigma_minor: float

    def __post_init__(self):
        angles = tuple(k.angle for k in self.kernels)
        if angles != CANONICAL_ANGLES:
            raise ValueError(f"kernel bank must hold angles {CANONICAL_ANGLES}")

    @property
    def size(self) -> int:
        return self.kernels[0].size

    def __iter__(self):
        return iter(self.kernels)


def make_kernel_bank(size: int = 5, sigma_major: float = 2.0,
                     sigma_minor: float = 0.5) -> KernelBank:
    kernels = tuple(
        make_skewed_gaussian(size, a, sigma_major, sigma_minor)
        for a in CANONICAL_ANGLES
    )
    return KernelBank(kernels=kernels, sigma_major=sigma_major,
                      sigma_minor=sigma_minor)


def flat_kernel(size: int = 5, angle: float = 0.0) -> OrientedKernel:
    """Isotropic all-ones kernel (square window, no Gaussian weighting)."""
    if size < 3 or size % 2 == 0:
        raise ValueError("kernel size must be odd and >= 3")
    return OrientedKernel(angle=angle, size=size,
                          weights=np.ones((size, size)))
