"""Segmentation adapters standing in for a trained network.

``oracle`` returns the rendered labels untouched. ``noisy`` relabels each
pixel with probability ``p_flip`` to a uniformly drawn class and stamps a
Poisson number of random elliptical blobs per frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..risk import OUTSIDE_CLASS


@dataclass(frozen=True)
class SegmenterConfig:
    kind: str = "oracle"
    p_flip: float = 0.0
    blob_rate: float = 0.0
    blob_classes: tuple[int, ...] = ()  # empty: any scene class
    blob_radius_px: tuple[float, float] = (2.0, 5.0)

    def __post_init__(self):
        if self.kind not in ("oracle", "noisy"):
            raise ConfigError(f"unknown segmenter {self.kind!r} (expected oracle or noisy)")
        if not 0 <= self.p_flip <= 1 or self.blob_rate < 0:
            raise ConfigError("p_flip must lie in [0, 1] and blob_rate must be >= 0")
        lo, hi = self.blob_radius_px
        if not 0 < lo <= hi:
            raise ConfigError("blob_radius_px must satisfy 0 < lo <= hi")


def segment(labels: np.ndarray, adapter: SegmenterConfig, rng: np.random.Generator,
            classes=None) -> np.ndarray:
    if adapter.kind == "oracle" or (adapter.p_flip == 0 and adapter.blob_rate == 0):
        return labels
    if classes is None:
        classes = sorted(set(np.unique(labels).tolist()) - {OUTSIDE_CLASS})
    classes = np.asarray(classes, dtype=np.uint8)
    out = labels.copy()
    inside = labels != OUTSIDE_CLASS
    if adapter.p_flip > 0:
        flip = (rng.random(labels.shape) < adapter.p_flip) & inside
        out[flip] = rng.choice(classes, size=int(flip.sum()))
    n_blobs = rng.poisson(adapter.blob_rate) if adapter.blob_rate > 0 else 0
    if n_blobs:
        h, w = labels.shape
        blob_classes = np.asarray(adapter.blob_classes or classes, dtype=np.uint8)
        ys, xs = np.mgrid[0:h, 0:w]
        lo, hi = adapter.blob_radius_px
        for _ in range(n_blobs):
            cx, cy = rng.uniform(0, w), rng.uniform(0, h)
            a, b = rng.uniform(lo, hi, size=2)
            ang = rng.uniform(0, np.pi)
            ca, sa = np.cos(ang), np.sin(ang)
            u = (xs - cx) * ca + (ys - cy) * sa
            v = -(xs - cx) * sa + (ys - cy) * ca
            m = ((u / a) ** 2 + (v / b) ** 2 <= 1.0) & inside
            out[m] = rng.choice(blob_classes)
    return out
