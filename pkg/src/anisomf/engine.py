"""Directional Minkowski functional fields on thresholded gray-level images.

A gray image is binarized at several thresholds; at every white pixel a
kernel-sized window (out-of-image pixels black) yields weighted cell sums
for each of the four oriented kernels, turned into directional area,
perimeter and Euler values by the same linear combinations as the exact
counts.  A numba kernel does the per-pixel work; a numpy reference path
backs the public single-window operations.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .kernels import KernelBank, OrientedKernel
from .morphometry import as_binary

FUNCTIONALS = ("area", "perimeter", "euler")


def threshold_image(gray, t: float) -> np.ndarray:
    """Binarize: white where gray value >= t."""
    g = np.asarray(gray, dtype=float)
    if not np.isfinite(t):
        raise ValueError("threshold must be finite")
    return g >= t


def default_thresholds(gray, n: int):
    """n equally spaced interior thresholds over the gray range."""
    g = np.asarray(gray, dtype=float)
    if n < 1:
        raise ValueError("need at least one threshold")
    lo, hi = float(g.min()), float(g.max())
    if lo == hi:
        raise ValueError("degenerate gray range: image is constant")
    return [lo + i * (hi - lo) / (n + 1) for i in range(1, n + 1)]


def weighted_counts(window, kernel: OrientedKernel, outside: float = 0.0):
    """Weighted (w_s, w_e, w_v) cell sums of a kernel-sized binary window.

    Cells are those of the white-pixel union of the window alone; pixels
    beyond the window are black.  `outside` is the pixel weight assumed
    beyond the kernel grid (0 by contract).
    """
    b = as_binary(window)
    if b.shape != (kernel.size, kernel.size):
        raise ValueError("window shape must match kernel size")
    q = np.zeros((kernel.size + 2, kernel.size + 2), dtype=bool)
    q[1:-1, 1:-1] = b
    horiz_on = q[:-1, 1:-1] | q[1:, 1:-1]
    vert_on = q[1:-1, :-1] | q[1:-1, 1:]
    vtx_on = q[:-1, :-1] | q[:-1, 1:] | q[1:, :-1] | q[1:, 1:]

    eh, ev, vw = kernel.edge_vertex_weights(outside)
    w_s = float((kernel.weights * b).sum())
    w_e = float(eh[horiz_on].sum() + ev[vert_on].sum())
    w_v = float(vw[vtx_on].sum())
    return w_s, w_e, w_v


def functionals_from_weights(w_s: float, w_e: float, w_v: float):
    return w_s, -4.0 * w_s + 2.0 * w_e, w_s - w_e + w_v


def amf_at_pixel(binary, x: int, y: int, bank: KernelBank,
                 outside: float = 0.0) -> np.ndarray:
    """Directional functional values at one white pixel.

    Returns a (3, 4) array indexed by (functional, direction) following
    FUNCTIONALS and the bank's angle order.
    """
    b = as_binary(binary)
    if not b[y, x]:
        raise ValueError("directional functionals are defined at white pixels only")
    r = bank.size // 2
    padded = np.zeros((b.shape[0] + 2 * r, b.shape[1] + 2 * r), dtype=bool)
    padded[r:-r, r:-r] = b
    window = padded[y:y + bank.size, x:x + bank.size]
    out = np.empty((3, 4))
    for d, kern in enumerate(bank):
        out[:, d] = functionals_from_weights(*weighted_counts(window, kern, outside))
    return out


@njit(cache=True, nogil=True)
def _amf_plane(padded, pix_w, eh_w, ev_w, vtx_w, out):
    # padded: (H+2r, W+2r) uint8; weight stacks carry the 4 directions;
    # out: (H, W, 3, 4), written only at white pixels
    k = pix_w.shape[1]
    r = k // 2
    h = padded.shape[0] - 2 * r
    w = padded.shape[1] - 2 * r
    for y in range(h):
        for x in range(w):
            if padded[y + r, x + r] == 0:
                continue
            for d in range(4):
                ws = 0.0
                we = 0.0
                wv = 0.0
                for i in range(k):
                    for j in range(k):
                        if padded[y + i, x + j] != 0:
                            ws += pix_w[d, i, j]
                # horizontal edges: lattice (k+1) x k
                for i in range(k + 1):
                    for j in range(k):
                        above = i > 0 and padded[y + i - 1, x + j] != 0
                        below = i < k and padded[y + i, x + j] != 0
                        if above or below:
                            we += eh_w[d, i, j]
                # vertical edges: lattice k x (k+1)
                for i in range(k):
                    for j in range(k + 1):
                        left = j > 0 and padded[y + i, x + j - 1] != 0
                        right = j < k and padded[y + i, x + j] != 0
                        if left or right:
                            we += ev_w[d, i, j]
                # vertices: lattice (k+1) x (k+1)
                for i in range(k + 1):
                    for j in range(k + 1):
                        on = False
                        if i > 0 and j > 0 and padded[y + i - 1, x + j - 1] != 0:
                            on = True
                        elif i > 0 and j < k and padded[y + i - 1, x + j] != 0:
                            on = True
                        elif i < k and j > 0 and padded[y + i, x + j - 1] != 0:
                            on = True
                        elif i < k and j < k and padded[y + i, x + j] != 0:
                            on = True
                        if on:
                            wv += vtx_w[d, i, j]
                out[y, x, 0, d] = ws
                out[y, x, 1, d] = -4.0 * ws + 2.0 * we
                out[y, x, 2, d] = ws - we + wv


def _weight_stacks(bank: KernelBank, outside: float = 0.0):
    k = bank.size
    pix = np.empty((4, k, k))
    eh = np.empty((4, k + 1, k))
    ev = np.empty((4, k, k + 1))
    vtx = np.empty((4, k + 1, k + 1))
    for d, kern in enumerate(bank):
        pix[d] = kern.weights
        eh[d], ev[d], vtx[d] = kern.edge_vertex_weights(outside)
    return pix, eh, ev, vtx


@dataclass
class AmfField:
    """Per-threshold directional functional values at white pixels."""

    thresholds: tuple
    masks: list        # per threshold: (H, W) bool
    values: list       # per threshold: (H, W, 3, 4); zeros at black pixels

    @property
    def shape(self):
        return self.masks[0].shape


def compute_amf_field(gray, thresholds, bank: KernelBank,
                      parallel: bool = False, outside: float = 0.0) -> AmfField:
    """Directional functional field for every threshold.

    Deterministic regardless of `parallel`: each threshold plane is written
    to its own slot.
    """
    g = np.asarray(gray, dtype=float)
    if g.ndim != 2:
        raise ValueError("gray image must be 2D")
    if not np.all(np.isfinite(g)):
        raise ValueError("gray image must be finite")
    ts = [float(t) for t in thresholds]
    if len(ts) == 0 or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("thresholds must be non-empty and strictly increasing")

    r = bank.size // 2
    pix, eh, ev, vtx = _weight_stacks(bank, outside)
    h, w = g.shape
    masks = [g >= t for t in ts]
    values = [np.zeros((h, w, 3, 4)) for _ in ts]

    def run(i):
        padded = np.zeros((h + 2 * r, w + 2 * r), dtype=np.uint8)
        padded[r:r + h, r:r + w] = masks[i]
        _amf_plane(padded, pix, eh, ev, vtx, values[i])

    if parallel and len(ts) > 1:
        with ThreadPoolExecutor() as pool:
            list(pool.map(run, range(len(ts))))
    else:
        for i in range(len(ts)):
            run(i)
    return AmfField(thresholds=tuple(ts), masks=masks, values=values)
