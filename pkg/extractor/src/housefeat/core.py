"""Manifest-driven batch feature extraction with a residual backbone.

The manifest is a CSV with header ``id,view,path``; each record id must
carry exactly 4 views numbered 1-4. Images go through the backbone's
standard preprocessing (resize to 256, center-crop 224, per-channel
normalization) and the activations of the final fully-connected layer
are written as one row per (id, view), in manifest order, in the
deep-feature CSV format: header ``id,view,f0..f999``.

The default backbone is the 50-layer residual network, whose final
layer is exactly 1000 wide. Other torchvision classification backbones
can be selected; widths other than 1000 are truncated or zero-padded to
1000 with a warning so the output contract stays fixed.
"""

import csv
import dataclasses
import os
import warnings
import zlib

import numpy as np
import torch
from PIL import Image
from torchvision import models
from torchvision.transforms import functional as TF

FEATURE_DIM = 1000
NUM_VIEWS = 4
DEFAULT_BACKBONE = "resnet50"

# standard channel statistics used by the published backbone recipes
_MEAN = [0.485, 0.456, 0.406]
_STD = [0.229, 0.224, 0.225]


class ExtractError(Exception):
    """Manifest, image, or backbone error."""


@dataclasses.dataclass
class ExtractionManifest:
    rows: list                     # (id, view, path) in file order
    backbone: str = DEFAULT_BACKBONE

    def __post_init__(self):
        views = {}
        for rid, view, _ in self.rows:
            if not 1 <= view <= NUM_VIEWS:
                raise ExtractError(
                    f"id {rid!r}: view {view} outside 1..{NUM_VIEWS}")
            seen = views.setdefault(rid, set())
            if view in seen:
                raise ExtractError(f"id {rid!r}: duplicate view {view}")
            seen.add(view)
        for rid, seen in views.items():
            if len(seen) != NUM_VIEWS:
                raise ExtractError(
                    f"id {rid!r}: expected {NUM_VIEWS} views, got {len(seen)}")


def read_manifest(path, backbone=DEFAULT_BACKBONE):
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["id", "view", "path"]:
            raise ExtractError(f"{path}: manifest header must be id,view,path")
        for i, row in enumerate(reader, start=1):
            if len(row) != 3:
                raise ExtractError(f"{path} row {i}: expected 3 columns")
            try:
                view = int(row[1])
            except ValueError:
                raise ExtractError(
                    f"{path} row {i}: unparsable view {row[1]!r}") from None
            rows.append((row[0], view, row[2]))
    return ExtractionManifest(rows, backbone)


def load_backbone(name=DEFAULT_BACKBONE, weights_path=None):
    """Build the backbone, frozen and in inference mode.

    If no local weights file is given the network is initialized from a
    seed derived from the backbone name, so extraction stays fully
    deterministic; a warning flags that the features are not pretrained.
    """
    torch.manual_seed(zlib.crc32(name.encode("utf-8")))
    try:
        model = models.get_model(name, weights=None)
    except ValueError as e:
        raise ExtractError(f"unknown backbone {name!r}: {e}") from None
    if weights_path is not None:
        try:
            state = torch.load(weights_path, map_location="cpu",
                               weights_only=True)
        except (OSError, RuntimeError, ValueError) as e:
            raise ExtractError(f"cannot load weights {weights_path!r}: {e}")
        model.load_state_dict(state)
    else:
        warnings.warn(
            f"no local weights for {name!r}; using deterministic "
            "seeded-random initialization", stacklevel=2)
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model


def _load_image(path, rid, view):
    try:
        with Image.open(path) as img:
            img = img.convert("RGB")
            img.load()
    except (OSError, SyntaxError, ValueError) as e:
        raise ExtractError(f"id {rid!r} view {view}: "
                           f"unreadable image {path!r}: {e}") from None
    x = TF.to_tensor(img)
    x = TF.resize(x, 256, antialias=True)
    x = TF.center_crop(x, 224)
    return TF.normalize(x, _MEAN, _STD)


def _fit_width(feats, backbone):
    if feats.shape[1] == FEATURE_DIM:
        return feats
    warnings.warn(
        f"backbone {backbone!r} emits {feats.shape[1]}-wide vectors; "
        f"projecting to {FEATURE_DIM} by truncation/zero-padding",
        stacklevel=3)
    out = np.zeros((feats.shape[0], FEATURE_DIM), dtype=feats.dtype)
    w = min(feats.shape[1], FEATURE_DIM)
    out[:, :w] = feats[:, :w]
    return out


def extract(manifest, out_path, weights_path=None, batch_size=8):
    """Run the backbone over every manifest row and write the CSV."""
    model = load_backbone(manifest.backbone, weights_path)
    header = ["id", "view"] + [f"f{j}" for j in range(FEATURE_DIM)]
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for start in range(0, len(manifest.rows), batch_size):
            chunk = manifest.rows[start : start + batch_size]
            batch = torch.stack(
                [_load_image(path, rid, view) for rid, view, path in chunk])
            with torch.no_grad():
                feats = model(batch).double().numpy()
            feats = _fit_width(feats, manifest.backbone)
            for (rid, view, _), vec in zip(chunk, feats):
                writer.writerow([rid, view] + [repr(float(v)) for v in vec])
    return len(manifest.rows)
