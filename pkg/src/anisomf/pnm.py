"""PNM (PGM/PPM) and CSV matrix I/O plus map rendering.

Graymaps P2/P5 are read and written with maxval up to 65535; masks are
graymaps where nonzero means inside the ROI.  Direction maps are written as
pixmaps with hue = 2 * angle, which places 0/60/120 degrees on pure
red/green/blue.  All writers go through write-then-rename so failed runs
leave no partial files.
"""

import colorsys
import csv
import os
import tempfile

import numpy as np


class PnmError(ValueError):
    """Malformed or unsupported PNM content."""


def _tokens(data: bytes):
    """Yield whitespace-separated header/ASCII tokens, skipping # comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i:i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        else:
            j = i
            while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            yield i, data[i:j]
            i = j


def read_pnm(path) -> np.ndarray:
    """Read a P2/P5 graymap (2D array) or P3/P6 pixmap (H x W x 3)."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks = _tokens(data)

    def next_tok():
        try:
            return next(toks)
        except StopIteration:
            raise PnmError(f"{path}: unexpected end of file") from None

    _, magic = next_tok()
    if magic not in (b"P2", b"P5", b"P3", b"P6"):
        raise PnmError(f"{path}: unsupported PNM magic {magic!r}")
    channels = 3 if magic in (b"P3", b"P6") else 1
    header = []
    for name in ("width", "height", "maxval"):
        pos, tok = next_tok()
        try:
            header.append(int(tok))
        except ValueError:
            raise PnmError(f"{path}: malformed header: bad {name} {tok!r}") from None
    width, height, maxval = header
    if width < 1 or height < 1:
        raise PnmError(f"{path}: non-positive dimensions")
    if not 0 < maxval <= 65535:
        raise PnmError(f"{path}: maxval out of range")
    count = width * height * channels

    if magic in (b"P2", b"P3"):
        values = []
        for _ in range(count):
            _, tok = next_tok()
            try:
                values.append(int(tok))
            except ValueError:
                raise PnmError(f"{path}: malformed sample {tok!r}") from None
        arr = np.asarray(values)
    else:
        # binary payload starts after the single whitespace byte that
        # terminates the maxval token
        start = pos + len(tok) + 1
        bytes_per = 2 if maxval > 255 else 1
        payload = data[start:start + count * bytes_per]
        if len(payload) < count * bytes_per:
            raise PnmError(f"{path}: unexpected end of file")
        dtype = ">u2" if bytes_per == 2 else np.uint8
        arr = np.frombuffer(payload, dtype=dtype).astype(int)
    if arr.max(initial=0) > maxval:
        raise PnmError(f"{path}: sample value exceeds maxval {maxval}")
    if (arr < 0).any():
        raise PnmError(f"{path}: negative sample value")
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, 3)


def read_gray(path) -> np.ndarray:
    """Read a gray-level image: P2/P5 graymap, or a CSV matrix of reals."""
    if str(path).lower().endswith(".csv"):
        return read_csv_matrix(path)
    arr = read_pnm(path)
    if arr.ndim != 2:
        raise PnmError(f"{path}: expected a graymap, got a pixmap")
    return arr.astype(float)


def read_mask(path) -> np.ndarray:
    return read_gray(path) != 0


def atomic_write(path, payload: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-pnm-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pgm(path, values, maxval: int = 255):
    """Write an integer 2D array as a binary P5 graymap."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise PnmError("graymap data must be 2D")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
        raise PnmError("graymap values out of range for maxval")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode()
    dtype = ">u2" if maxval > 255 else np.uint8
    atomic_write(path, header + arr.astype(dtype).tobytes())


def write_ppm(path, rgb):
    """Write an (H, W, 3) uint8 array as a binary P6 pixmap."""
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise PnmError("pixmap data must be (H, W, 3)")
    header = f"P6\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode()
    atomic_write(path, header + arr.astype(np.uint8).tobytes())


def read_csv_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise PnmError(f"{path}: empty CSV matrix")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise PnmError(f"{path}: ragged CSV matrix")
    return np.asarray(rows)


def write_csv_matrix(path, values):
    arr = np.asarray(values, dtype=float)
    body = "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in arr)
    atomic_write(path, body.encode())


def write_histogram_csv(path, hist):
    rows = ["bin_lo,bin_hi,count,frequency\n"]
    freqs = hist.frequencies
    for i in range(len(hist.counts)):
        rows.append(f"{hist.bin_edges[i]:.17g},{hist.bin_edges[i + 1]:.17g},"
                    f"{int(hist.counts[i])},{freqs[i]:.17g}\n")
    atomic_write(path, "".join(rows).encode())


def write_fa_map(maps, path_csv, path_pgm, fa_display_max: float = 0.1):
    """Raw FA values as CSV plus an 8-bit display graymap.

    Display gray = round(255 * min(fa / fa_display_max, 1)); the CSV keeps
    full precision.
    """
    write_csv_matrix(path_csv, maps.fa_map)
    scaled = np.rint(255.0 * np.minimum(maps.fa_map / fa_display_max, 1.0))
    write_pgm(path_pgm, scaled.astype(np.uint8))


def angle_to_rgb(angle_deg: float):
    """Axial angle to full-saturation RGB; hue = 2 * angle."""
    r, g, b = colorsys.hsv_to_rgb((2.0 * angle_deg % 360.0) / 360.0, 1.0, 1.0)
    return int(round(255 * r)), int(round(255 * g)), int(round(255 * b))


def write_direction_map(maps, path):
    """Color-coded principal-direction pixmap; unoriented pixels black."""
    h, w = maps.angle_map.shape
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    oriented = maps.oriented & np.isfinite(maps.angle_map)
    ys, xs = np.nonzero(oriented)
    for y, x in zip(ys, xs):
        rgb[y, x] = angle_to_rgb(maps.angle_map[y, x])
    write_ppm(path, rgb)
