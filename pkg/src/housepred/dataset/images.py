"""Binary PPM (P6) reading/writing and 4-view image assembly.

Each record carries 4 ordered views.  They are resized to half the grid
side with bilinear interpolation and tiled row-major into a 2x2 grid,
giving one channels-first tensor per record with values in [0, 1].
"""

import numpy as np

from .records import RecordError, NUM_VIEWS

VIEW_GRID = 2  # 2x2 tiling of the 4 views


def read_ppm(path):
    """Read a binary P6 PPM into a (H, W, 3) uint8 array."""
    with open(path, "rb") as f:
        data = f.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RecordError(f"{path}: truncated PPM header")
        fields.append(data[start:pos])
    if fields[0] != b"P6":
        raise RecordError(f"{path}: not a binary PPM (P6) file")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise RecordError(f"{path}: unsupported maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    raw = data[pos : pos + w * h * 3]
    if len(raw) != w * h * 3:
        raise RecordError(f"{path}: truncated PPM pixel data")
    return np.frombuffer(raw, dtype=np.uint8).reshape(h, w, 3)


def write_ppm(path, img):
    img = np.asarray(img, dtype=np.uint8)
    h, w, _ = img.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(img.tobytes())


def resize_bilinear(img, out_h, out_w):
    """Bilinear resize of an (H, W, C) float array."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    ys = (np.arange(out_h) + 0.5) * h / out_h - 0.5
    xs = (np.arange(out_w) + 0.5) * w / out_w - 0.5
    ys = np.clip(ys, 0, h - 1)
    xs = np.clip(xs, 0, w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    top = img[y0][:, x0] * (1 - wx) + img[y0][:, x1] * wx
    bot = img[y1][:, x0] * (1 - wx) + img[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def tile_views(views, grid_side):
    """Tile 4 (H, W, 3) views row-major into one (3, S, S) tensor in [0, 1]."""
    if len(views) != NUM_VIEWS:
        raise RecordError(f"expected {NUM_VIEWS} views, got {len(views)}")
    half = grid_side // VIEW_GRID
    if half * VIEW_GRID != grid_side:
        raise ValueError(f"grid side must be even, got {grid_side}")
    out = np.empty((grid_side, grid_side, 3))
    for k, v in enumerate(views):
        r, c = divmod(k, VIEW_GRID)
        out[r * half : (r + 1) * half, c * half : (c + 1) * half] = (
            resize_bilinear(v, half, half)
        )
    return (out / 255.0).transpose(2, 0, 1)


def load_images(record, grid_side=128):
    """Load a record's 4 views from disk into one tiled image tensor."""
    if len(record.image_refs) != NUM_VIEWS:
        raise RecordError(
            f"record {record.id!r}: expected {NUM_VIEWS} image refs, "
            f"got {len(record.image_refs)}"
        )
    views = []
    for k, ref in enumerate(record.image_refs, start=1):
        try:
            views.append(read_ppm(ref))
        except (OSError, RecordError) as e:
            raise RecordError(f"record {record.id!r}, view {k}: {e}") from None
    return tile_views(views, grid_side)
