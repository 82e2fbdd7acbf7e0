"""File formats: LLT1 raw tensors, binary PGM/PPM, label color table.

Writers go through a temporary file in the target directory and rename on
success, so a failed write never leaves a partial file behind.
"""
import os
import re
import tempfile

import numpy as np

from .core import Label

LLT1_MAGIC = b"LLT1"

LABEL_COLORS = {
    Label.GROUND: (128, 64, 128),
    Label.VEHICLE: (0, 0, 142),
    Label.PEDESTRIAN: (220, 20, 60),
    Label.BUILDING: (70, 70, 70),
    Label.SKY: (70, 130, 180),
}
# unlabeled ground-truth pixels
IGNORE_COLOR = (0, 0, 0)


class FormatError(ValueError):
    pass


def atomic_write(path, data: bytes):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_llt1(tensor) -> bytes:
    t = np.asarray(tensor)
    if t.ndim != 3:
        raise FormatError(f"LLT1 tensors are (C, H, W), got shape {t.shape}")
    c, h, w = t.shape
    header = f"LLT1 {w} {h} {c}\n".encode("ascii")
    return header + np.ascontiguousarray(t, dtype="<f4").tobytes()


def decode_llt1(data: bytes, name="<bytes>"):
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError(f"{name}: missing LLT1 header line")
    parts = data[:nl].split()
    if len(parts) != 4 or parts[0] != LLT1_MAGIC:
        raise FormatError(f"{name}: bad LLT1 header {data[:nl][:40]!r}")
    try:
        w, h, c = (int(p) for p in parts[1:])
    except ValueError:
        raise FormatError(f"{name}: non-integer LLT1 dimensions") from None
    if min(w, h, c) < 1:
        raise FormatError(f"{name}: LLT1 dimensions must be positive")
    payload = data[nl + 1:]
    expected = 4 * w * h * c
    if len(payload) != expected:
        raise FormatError(f"{name}: header says {w}x{h}x{c} ({expected} bytes), "
                          f"payload has {len(payload)} bytes")
    return np.frombuffer(payload, dtype="<f4").reshape(c, h, w).astype(np.float64)


def write_llt1(path, tensor):
    atomic_write(path, encode_llt1(tensor))


def read_llt1(path):
    with open(path, "rb") as f:
        return decode_llt1(f.read(), name=os.fspath(path))


_PNM_HEADER = re.compile(rb"\A(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)"
                         rb"\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def _parse_pnm(data: bytes, name):
    m = _PNM_HEADER.match(data)
    if not m:
        raise FormatError(f"{name}: not a binary PGM/PPM file")
    magic = m.group(1)
    w, h, maxval = int(m.group(2)), int(m.group(3)), int(m.group(4))
    if w < 1 or h < 1 or not 1 <= maxval <= 65535:
        raise FormatError(f"{name}: bad dimensions or maxval")
    channels = 1 if magic == b"P5" else 3
    dtype = ">u2" if maxval > 255 else "u1"
    n = w * h * channels
    payload = data[m.end():]
    nbytes = n * np.dtype(dtype).itemsize
    if len(payload) < nbytes:
        raise FormatError(f"{name}: truncated pixel data")
    px = np.frombuffer(payload[:nbytes], dtype=dtype).reshape((h, w, channels) if channels == 3 else (h, w))
    return magic, px.astype(np.int64), maxval


def read_pgm(path):
    """Integer pixel values and maxval of a P5 file."""
    with open(path, "rb") as f:
        magic, px, maxval = _parse_pnm(f.read(), os.fspath(path))
    if magic != b"P5":
        raise FormatError(f"{path}: expected a P5 (PGM) file")
    return px, maxval


def read_gray(path):
    """P5 image normalized to [0, 1]."""
    px, maxval = read_pgm(path)
    return px / float(maxval)


def encode_pgm(values, maxval=255) -> bytes:
    values = np.asarray(values)
    if values.ndim != 2:
        raise FormatError("PGM data must be 2-D")
    if values.min(initial=0) < 0 or values.max(initial=0) > maxval:
        raise FormatError(f"PGM values outside [0, {maxval}]")
    h, w = values.shape
    dtype = ">u2" if maxval > 255 else "u1"
    return f"P5\n{w} {h}\n{maxval}\n".encode("ascii") + values.astype(dtype).tobytes()


def write_pgm(path, values, maxval=255):
    atomic_write(path, encode_pgm(values, maxval))


def write_gray(path, img):
    write_pgm(path, np.rint(np.clip(img, 0.0, 1.0) * 255).astype(np.int64), 255)


def write_ppm(path, rgb):
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise FormatError("PPM data must be (H, W, 3)")
    h, w, _ = rgb.shape
    atomic_write(path, f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.astype("u1").tobytes())


def read_ppm(path):
    with open(path, "rb") as f:
        magic, px, maxval = _parse_pnm(f.read(), os.fspath(path))
    if magic != b"P6" or maxval != 255:
        raise FormatError(f"{path}: expected an 8-bit P6 (PPM) file")
    return px


def labels_to_rgb(labels):
    labels = np.asarray(labels)
    table = np.array([LABEL_COLORS[Label(i)] for i in range(len(Label))], dtype=np.uint8)
    return table[labels]


def rgb_to_labels(rgb, name="<image>"):
    """Decode colors to label codes. Returns ``(labels, ignore_mask)``.

    Black pixels are unlabeled and land in the ignore mask; any other color
    outside the table is an error.
    """
    rgb = np.asarray(rgb)
    h, w, _ = rgb.shape
    labels = np.zeros((h, w), dtype=np.uint8)
    known = np.zeros((h, w), dtype=bool)
    for lab, color in LABEL_COLORS.items():
        hit = np.all(rgb == color, axis=2)
        labels[hit] = lab
        known |= hit
    ignore = np.all(rgb == IGNORE_COLOR, axis=2)
    unknown = ~(known | ignore)
    if unknown.any():
        y, x = np.argwhere(unknown)[0]
        raise FormatError(f"{name}: unknown label color {tuple(int(v) for v in rgb[y, x])} "
                          f"at pixel (x={x + 1}, y={y + 1})")
    return labels, ignore


def write_label_map(path, labels):
    write_ppm(path, labels_to_rgb(labels))


def read_label_map(path):
    return rgb_to_labels(read_ppm(path), name=os.fspath(path))


def disparity_to_pgm16(disp, disparities):
    """Scale disparity levels by 256 / D into 16-bit integers."""
    return np.rint(np.asarray(disp, dtype=np.float64) * 256.0 / disparities).astype(np.int64)


def write_disparity(path, disp, disparities):
    write_pgm(path, disparity_to_pgm16(disp, disparities), maxval=65535)
