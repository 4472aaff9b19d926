"""Images and videos as joint time-vertex signals.

Pixels become vertices of a 4-connected grid graph, frames become time
steps, and gray values (kept on the 0..255 scale) become the signal.
Only PGM input is supported: P2 (ASCII) and P5 (binary substream),
maxval up to 255. Resizing is plain bilinear interpolation with
row-major flattening, fixed here so runs are reproducible.
"""
from __future__ import annotations

import re

import numpy as np

from .errors import TooFewFramesError, TooSmallError, UnreadableImageError
from .graphs import Graph, grid_graph, ring_graph


def read_pgm(path) -> np.ndarray:
    """Read a P2/P5 PGM file into a float array on the 0..255 scale."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise UnreadableImageError(f"{path}: {exc}") from exc

    # header: magic, width, height, maxval, with # comments allowed
    tokens = []
    pos = 0
    while len(tokens) < 4:
        match = re.match(rb"\s*(#[^\n]*\n|\S+)", blob[pos:])
        if match is None:
            raise UnreadableImageError(f"{path}: truncated PGM header")
        pos += match.end()
        tok = match.group(1)
        if not tok.startswith(b"#"):
            tokens.append(tok)
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise UnreadableImageError(f"{path}: malformed PGM header") from exc
    if magic not in (b"P2", b"P5"):
        raise UnreadableImageError(f"{path}: unsupported magic {magic!r}")
    if width < 1 or height < 1 or not (0 < maxval <= 255):
        raise UnreadableImageError(
            f"{path}: bad dimensions or maxval ({width}x{height}, {maxval})"
        )

    count = width * height
    if magic == b"P5":
        data = blob[pos + 1 : pos + 1 + count]  # single whitespace after maxval
        if len(data) != count:
            raise UnreadableImageError(f"{path}: expected {count} pixel bytes")
        pixels = np.frombuffer(data, dtype=np.uint8).astype(float)
    else:
        try:
            values = [int(t) for t in blob[pos:].split()]
        except ValueError as exc:
            raise UnreadableImageError(f"{path}: non-numeric P2 payload") from exc
        if len(values) != count:
            raise UnreadableImageError(
                f"{path}: expected {count} pixel values, got {len(values)}"
            )
        pixels = np.array(values, dtype=float)
    if pixels.min() < 0 or pixels.max() > maxval:
        raise UnreadableImageError(f"{path}: pixel values exceed maxval {maxval}")
    img = pixels.reshape((height, width))
    if maxval != 255:
        img = img * (255.0 / maxval)
    return img


def write_pgm(path, img: np.ndarray, binary: bool = True) -> None:
    """Write a gray image (any float range; clipped to 0..255) as PGM."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise UnreadableImageError(f"expected a 2-D image, got shape {img.shape}")
    quantized = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    height, width = quantized.shape
    if binary:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(quantized.tobytes())
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"P2\n{width} {height}\n255\n")
            for row in quantized:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize with bilinear interpolation (corner-aligned sampling)."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise UnreadableImageError(f"expected a 2-D image, got shape {img.shape}")
    if out_h < 1 or out_w < 1:
        raise TooSmallError("output size must be at least 1x1")
    in_h, in_w = img.shape
    ys = np.linspace(0.0, in_h - 1.0, out_h) if out_h > 1 else np.array([0.0])
    xs = np.linspace(0.0, in_w - 1.0, out_w) if out_w > 1 else np.array([0.0])
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = img[np.ix_(y0, x0)] * (1 - wx) + img[np.ix_(y0, x1)] * wx
    bottom = img[np.ix_(y1, x0)] * (1 - wx) + img[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bottom * wy


def image_to_joint(
    img_a: np.ndarray, img_b: np.ndarray, t: int, n: int
) -> tuple[np.ndarray, Graph]:
    """Linear morph between two images as an n^2 x t joint signal.

    Both images are resized to n x n; frame j is the blend
    (1 - j/(t-1)) * A + (j/(t-1)) * B, flattened row-major. The vertex
    graph is the 4-connected n x n grid.
    """
    if t < 2:
        raise TooSmallError(f"need at least 2 frames, got {t}")
    a = bilinear_resize(img_a, n, n).ravel()
    b = bilinear_resize(img_b, n, n).ravel()
    weights = np.arange(t) / (t - 1)
    signal = a[:, None] * (1.0 - weights)[None, :] + b[:, None] * weights[None, :]
    return signal, grid_graph(n, n, 4)


def video_to_joint(frames, n: int) -> tuple[np.ndarray, Graph, Graph]:
    """Frame sequence as an n^2 x T signal plus grid and ring graphs."""
    frames = list(frames)
    if len(frames) < 3:
        raise TooFewFramesError(f"need at least 3 frames, got {len(frames)}")
    columns = [bilinear_resize(f, n, n).ravel() for f in frames]
    signal = np.column_stack(columns)
    return signal, grid_graph(n, n, 4), ring_graph(len(frames))
