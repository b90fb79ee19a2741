"""Semantic labels -> risk scores, and the max-accumulating global risk memory."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EmptyViewError, RiskMappingError
from .geometry import (CameraModel, GroundTransform, VehiclePose,
                       ground_transform_from_pose)

R_MAX = 4

# class id 255 is what the renderer emits for pixels that fall outside the scene
OUTSIDE_CLASS = 255

DEFAULT_CLASSES = {
    0: "grass",
    1: "vegetation",
    2: "pavement",
    3: "bare_ground",
    4: "building",
    5: "water",
    6: "vehicle",
    7: "person",
    OUTSIDE_CLASS: "outside",
}

DEFAULT_RISK_BY_NAME = {
    "grass": 0,
    "vegetation": 1,
    "pavement": 1,
    "bare_ground": 2,
    "building": 3,
    "water": 3,
    "vehicle": 4,
    "person": 4,
    "outside": 2,
}


@dataclass
class RiskTable:
    """Class id -> integer risk score in ``[0, R_MAX]``."""

    risk: dict[int, int]
    names: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        for cid, r in self.risk.items():
            if not 0 <= cid <= 255:
                raise RiskMappingError(f"class id {cid} out of range 0..255")
            if not 0 <= r <= R_MAX:
                raise RiskMappingError(f"risk {r} for class {cid} outside [0, {R_MAX}]")
        self._lut = np.full(256, -1, dtype=np.int16)
        for cid, r in self.risk.items():
            self._lut[cid] = r

    @classmethod
    def default(cls) -> "RiskTable":
        return cls.from_names(DEFAULT_CLASSES, DEFAULT_RISK_BY_NAME)

    @classmethod
    def from_names(cls, class_names: dict[int, str], risk_by_name: dict[str, int]) -> "RiskTable":
        risk = {}
        for cid, name in class_names.items():
            if name not in risk_by_name:
                raise RiskMappingError(f"no risk value for class {name!r} (id {cid})")
            risk[int(cid)] = int(risk_by_name[name])
        return cls(risk, dict(class_names))

    @property
    def lut(self) -> np.ndarray:
        return self._lut

    def class_ids(self, with_risk_above=None) -> list[int]:
        ids = sorted(c for c in self.risk if c != OUTSIDE_CLASS)
        if with_risk_above is None:
            return ids
        return [c for c in ids if self.risk[c] > with_risk_above]


def risk_from_labels(labels: np.ndarray, table: RiskTable) -> np.ndarray:
    """Per-pixel table lookup; returns a ``uint8`` risk map."""
    labels = np.asarray(labels)
    out = table.lut[labels]
    if out.min(initial=0) < 0:
        bad = sorted(set(np.unique(labels[out < 0]).tolist()))
        raise RiskMappingError(f"unknown class id(s) {bad} in label map")
    return out.astype(np.uint8)


class GlobalRiskMap:
    """World-anchored risk memory updated by pixel-wise maximum.

    ``grid`` stores the maximum risk observed per cell and starts at zero, so
    stored values can only grow. Cells never observed are reported as
    ``default_risk`` by :meth:`values` and :func:`local_view`.
    """

    def __init__(self, shape, resolution=0.05, origin=(0.0, 0.0), default_risk=2):
        self.grid = np.zeros(shape, dtype=np.uint8)
        self.initialized = np.zeros(shape, dtype=bool)
        self.resolution = float(resolution)
        self.origin = (float(origin[0]), float(origin[1]))
        self.default_risk = int(default_risk)
        self.clipped = 0  # local pixels that fell outside the grid

    @property
    def shape(self):
        return self.grid.shape

    def values(self) -> np.ndarray:
        return np.where(self.initialized, self.grid, np.uint8(self.default_risk)).astype(np.uint8)

    def transform_for(self, pose: VehiclePose, cam: CameraModel) -> GroundTransform:
        return ground_transform_from_pose(pose, cam, self.resolution, self.origin)

    def copy(self) -> "GlobalRiskMap":
        other = GlobalRiskMap(self.shape, self.resolution, self.origin, self.default_risk)
        other.grid[...] = self.grid
        other.initialized[...] = self.initialized
        other.clipped = self.clipped
        return other


def _cell_bbox(t: GroundTransform, local_shape, grid_shape):
    h, w = local_shape
    corners = np.array([[-0.5, -0.5], [w - 0.5, -0.5], [w - 0.5, h - 0.5], [-0.5, h - 0.5]])
    g = t.forward(corners)
    c0 = max(int(np.floor(g[:, 0].min())), 0)
    c1 = min(int(np.ceil(g[:, 0].max())), grid_shape[1] - 1)
    r0 = max(int(np.floor(g[:, 1].min())), 0)
    r1 = min(int(np.ceil(g[:, 1].max())), grid_shape[0] - 1)
    return c0, c1, r0, r1


def accumulate_global(global_map: GlobalRiskMap, local: np.ndarray, t: GroundTransform) -> GlobalRiskMap:
    """Max-merge ``local`` into the global map in place and return it.

    A global cell is touched by a local pixel when it is the pixel's nearest
    cell, or when the cell centre maps back onto that pixel. The second rule
    covers every cell under the footprint when local pixels are larger than
    cells; the first guarantees every local pixel lands somewhere when they
    are smaller.
    """
    local = np.ascontiguousarray(local, dtype=np.uint8)
    c0, c1, r0, r1 = _cell_bbox(t, local.shape, global_map.shape)
    clipped = kernels.accumulate_max(global_map.grid, global_map.initialized, local,
                                     t.affine(), t.inverse_affine(), c0, c1, r0, r1)
    global_map.clipped += int(clipped)
    return global_map


def local_view(global_map: GlobalRiskMap, pose: VehiclePose, cam: CameraModel) -> np.ndarray:
    """Nearest-neighbour sample of the global map over the camera footprint."""
    t = global_map.transform_for(pose, cam)
    out, inside = kernels.sample_nearest(global_map.grid, global_map.initialized, True,
                                         t.affine(), cam.height, cam.width,
                                         np.uint8(global_map.default_risk))
    if inside == 0:
        raise EmptyViewError("camera footprint does not overlap the global risk map")
    return out


def risk_to_image(risk: np.ndarray) -> np.ndarray:
    """8-bit grayscale rendering, brighter = riskier (``risk * 63``)."""
    return np.clip(np.rint(np.asarray(risk, dtype=float) * 63.0), 0, 255).astype(np.uint8)


__all__ = [
    "R_MAX", "OUTSIDE_CLASS", "DEFAULT_CLASSES", "DEFAULT_RISK_BY_NAME", "RiskTable",
    "risk_from_labels", "GlobalRiskMap", "accumulate_global", "local_view", "risk_to_image",
]
