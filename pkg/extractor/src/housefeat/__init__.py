"""Deep-feature extraction for house images.

Reads a manifest of (id, view, image path) rows, runs each image
through a pretrained residual backbone, and writes one 1000-wide
feature row per (id, view) in the deep-feature CSV format.
"""

from .core import (
    FEATURE_DIM,
    ExtractError,
    ExtractionManifest,
    extract,
    load_backbone,
    read_manifest,
)

__all__ = [
    "FEATURE_DIM",
    "ExtractError",
    "ExtractionManifest",
    "extract",
    "load_backbone",
    "read_manifest",
]
