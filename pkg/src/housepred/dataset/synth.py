"""Synthetic house datasets with known generating coefficients.

The price of each synthetic record is an affine function of its encoded
text attributes, plus a brightness term carried by its 4 solid-color
views, plus a latent term carried by its 1000-d "deep feature" vectors,
plus Gaussian noise.  The generating coefficients are returned so tests
can check models against exact ground truth.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .records import HouseRecord, write_records, write_deep_features, DEEP_FEATURE_DIM, NUM_VIEWS
from .schema import Attribute, AttributeSchema, KIND_CATEGORICAL, KIND_MACRO, KIND_NUMERIC
from .images import write_ppm, VIEW_GRID

VIEW_PIXELS = 8  # written view images are 8x8 solid colors

_BASE = 150.0
_NUMERIC_COEFS = {"rooms": 8.0, "area": 0.3, "age": -1.0, "cpi": 0.5}
_LEVEL_OFFSETS = {
    "layout": {"flat": 0.0, "duplex": 10.0, "split_level": 5.0},
    "elevator": {"no": 0.0, "yes": 8.0},
}
_PRICE_SCALE = 250.0  # rough mean price; sigma_frac is relative to this


def synth_schema():
    a = Attribute
    return AttributeSchema(
        (
            a("rooms", KIND_NUMERIC),
            a("area", KIND_NUMERIC),
            a("age", KIND_NUMERIC),
            a("layout", KIND_CATEGORICAL, ("flat", "duplex", "split_level")),
            a("elevator", KIND_CATEGORICAL, ("no", "yes")),
            a("cpi", KIND_MACRO),
        )
    )


@dataclass
class SyntheticDataset:
    schema: AttributeSchema
    records: list
    view_colors: np.ndarray = field(repr=False)   # (n, 4, 3) uint8
    per_view_deep: np.ndarray = field(repr=False)  # (n, 4, 1000)
    truth: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.records)

    @property
    def prices(self):
        return np.array([r.price for r in self.records])

    def deep_features(self):
        """Per-record mean of the 4 view vectors, matching load_deep_features."""
        return self.per_view_deep.mean(axis=1)

    def image_tensors(self, grid_side=128):
        """(n, 3, S, S) tiled view tensors, values in [0, 1].

        Views are solid colors, so tiling fills each quadrant directly
        (bilinear resize of a constant image is that constant).
        """
        n = self.n
        half = grid_side // VIEW_GRID
        out = np.empty((n, 3, grid_side, grid_side))
        colors = self.view_colors / 255.0
        for k in range(NUM_VIEWS):
            r, c = divmod(k, VIEW_GRID)
            block = colors[:, k].T[:, :, None, None]  # (3, n) -> broadcast
            out[:, :, r * half : (r + 1) * half, c * half : (c + 1) * half] = (
                block.transpose(1, 0, 2, 3)
            )
        return out


def synth_generate(n, seed, sigma_frac=0.05, brightness_weight=40.0,
                   deep_weight=50.0):
    """Generate n synthetic records with known ground truth.

    ``sigma_frac`` is the noise standard deviation as a fraction of the
    nominal price scale.  Setting ``brightness_weight`` and
    ``deep_weight`` to 0 makes the price exactly affine in the encoded
    text block (plus noise).
    """
    if n < 20:
        raise ValueError(f"need at least 20 synthetic records, got {n}")
    rng = np.random.default_rng(seed)
    schema = synth_schema()

    rooms = rng.integers(1, 6, size=n).astype(float)
    area = np.round(rng.uniform(60.0, 200.0, size=n), 1)
    age = rng.integers(0, 31, size=n).astype(float)
    layout = rng.choice(schema.attribute("layout").levels, size=n)
    elevator = rng.choice(schema.attribute("elevator").levels, size=n)
    cpi = np.round(rng.uniform(95.0, 105.0, size=n), 2)

    # brightness carried by the views; latent carried by the deep vectors
    brightness = rng.uniform(0.15, 0.85, size=n)
    latent = rng.uniform(-1.0, 1.0, size=n)
    sigma = sigma_frac * _PRICE_SCALE
    noise = rng.normal(0.0, sigma, size=n) if sigma > 0 else np.zeros(n)

    text_part = (
        _BASE
        + _NUMERIC_COEFS["rooms"] * rooms
        + _NUMERIC_COEFS["area"] * area
        + _NUMERIC_COEFS["age"] * age
        + _NUMERIC_COEFS["cpi"] * cpi
        + np.array([_LEVEL_OFFSETS["layout"][v] for v in layout])
        + np.array([_LEVEL_OFFSETS["elevator"][v] for v in elevator])
    )
    prices = (
        text_part
        + brightness_weight * (2.0 * brightness - 1.0)
        + deep_weight * latent
        + noise
    )
    if np.any(prices <= 0):
        raise AssertionError("synthetic price generation produced a non-positive price")

    # view colors: per-record brightness plus small per-view channel jitter
    jitter = rng.uniform(-20.0, 20.0, size=(n, NUM_VIEWS, 3))
    jitter -= jitter.mean(axis=(1, 2), keepdims=True)  # keep mean = brightness
    view_colors = np.clip(brightness[:, None, None] * 255.0 + jitter, 0, 255)
    view_colors = np.round(view_colors).astype(np.uint8)

    direction = rng.normal(size=DEEP_FEATURE_DIM)
    direction /= np.linalg.norm(direction)
    per_view_deep = (
        latent[:, None, None] * 3.0 * direction[None, None, :]
        + 0.05 * rng.normal(size=(n, NUM_VIEWS, DEEP_FEATURE_DIM))
    )

    width = len(str(n))
    records = []
    for i in range(n):
        rid = f"h{i:0{width}d}"
        refs = tuple(f"images/{rid}_{v}.ppm" for v in range(1, NUM_VIEWS + 1))
        rec = HouseRecord(
            rid,
            {
                "rooms": rooms[i], "area": area[i], "age": age[i],
                "layout": str(layout[i]), "elevator": str(elevator[i]),
                "cpi": cpi[i],
            },
            float(prices[i]),
            refs,
        )
        records.append(rec)

    truth = {
        "base": _BASE,
        "numeric_coefs": dict(_NUMERIC_COEFS),
        "level_offsets": {k: dict(v) for k, v in _LEVEL_OFFSETS.items()},
        "brightness_weight": brightness_weight,
        "deep_weight": deep_weight,
        "sigma": sigma,
        "seed": int(seed),
        "brightness": brightness.tolist(),
        "latent": latent.tolist(),
        "noise": noise.tolist(),
    }
    return SyntheticDataset(schema, records, view_colors, per_view_deep, truth)


def write_dataset(ds, out_dir):
    """Materialize a synthetic dataset as the on-disk file formats."""
    os.makedirs(os.path.join(out_dir, "images"), exist_ok=True)
    ds.schema.save(os.path.join(out_dir, "schema.json"))
    write_records(os.path.join(out_dir, "records.csv"), ds.records, ds.schema)
    write_deep_features(
        os.path.join(out_dir, "deep_features.csv"),
        [r.id for r in ds.records],
        ds.per_view_deep,
    )
    for i, rec in enumerate(ds.records):
        for v in range(NUM_VIEWS):
            img = np.broadcast_to(
                ds.view_colors[i, v], (VIEW_PIXELS, VIEW_PIXELS, 3)
            )
            write_ppm(os.path.join(out_dir, rec.image_refs[v]), img)
    with open(os.path.join(out_dir, "truth.json"), "w", encoding="utf-8") as f:
        json.dump(ds.truth, f, indent=2, sort_keys=True)
