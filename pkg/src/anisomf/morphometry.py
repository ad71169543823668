"""Exact cell-complex counting and 2D Minkowski functionals on binary images.

The foreground of a binary image is treated as the union of closed unit
squares placed at white pixels.  Shared edges and vertices are counted once,
which implies 8-connectivity for foreground and 4-connectivity for background.
All counts are exact integers; out-of-image pixels are black.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class CellCounts:
    """Distinct squares, edges and vertices of the white-pixel union."""

    n_s: int
    n_e: int
    n_v: int


@dataclass(frozen=True)
class MfTriple:
    area: int
    perimeter: int
    euler: int


def as_binary(pixels) -> np.ndarray:
    """Validate and convert to a 2D boolean array (True = white)."""
    arr = np.asarray(pixels)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("binary image must be a non-empty 2D grid")
    return arr.astype(bool)


def count_cells(pixels) -> CellCounts:
    """Count distinct squares, edges and vertices of the closed-square union.

    Edges live on an (H+1) x W lattice (horizontal) and H x (W+1) lattice
    (vertical); a lattice edge is present if either flanking pixel is white.
    A lattice vertex is present if any of its up-to-4 surrounding pixels is
    white.
    """
    b = as_binary(pixels)
    h, w = b.shape
    p = np.zeros((h + 2, w + 2), dtype=bool)
    p[1:-1, 1:-1] = b

    n_s = int(b.sum())
    # horizontal edges between pixel rows r-1 and r
    horiz = p[:-1, 1:-1] | p[1:, 1:-1]
    # vertical edges between pixel columns c-1 and c
    vert = p[1:-1, :-1] | p[1:-1, 1:]
    n_e = int(horiz.sum()) + int(vert.sum())
    corners = p[:-1, :-1] | p[:-1, 1:] | p[1:, :-1] | p[1:, 1:]
    n_v = int(corners.sum())
    return CellCounts(n_s, n_e, n_v)


def minkowski_functionals(c: CellCounts) -> MfTriple:
    """Area, perimeter and Euler characteristic from cell counts."""
    return MfTriple(
        area=c.n_s,
        perimeter=-4 * c.n_s + 2 * c.n_e,
        euler=c.n_s - c.n_e + c.n_v,
    )


def image_minkowski(pixels) -> MfTriple:
    return minkowski_functionals(count_cells(pixels))


_STRUCT8 = np.ones((3, 3), dtype=int)


def euler_oracle(pixels) -> int:
    """Independent Euler characteristic: components minus holes.

    Foreground components use 8-connectivity, enclosed background components
    4-connectivity; background regions touching the image border are not
    holes.
    """
    b = as_binary(pixels)
    _, n_fg = ndimage.label(b, structure=_STRUCT8)
    padded = np.zeros((b.shape[0] + 2, b.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = b
    bg_labels, n_bg = ndimage.label(~padded)
    # every border-connected background region carries the label of the
    # padding ring, so holes are the remaining labels
    border_label = bg_labels[0, 0]
    hole_labels = set(np.unique(bg_labels)) - {0, border_label}
    return n_fg - len(hole_labels)


def perimeter_oracle(pixels) -> int:
    """Independent perimeter: white/black 4-adjacencies, border counts black."""
    b = as_binary(pixels)
    p = np.zeros((b.shape[0] + 2, b.shape[1] + 2), dtype=bool)
    p[1:-1, 1:-1] = b
    total = 0
    for axis, shift in ((0, 1), (0, -1), (1, 1), (1, -1)):
        neighbor = np.roll(p, shift, axis=axis)
        total += int((p & ~neighbor).sum())
    return total
