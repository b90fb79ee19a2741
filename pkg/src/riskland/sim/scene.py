"""Scene model: a world-anchored label raster plus moving rectangular obstacles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import ConfigError, RenderError, UnsupportedSceneError
from ..geometry import CameraModel, VehiclePose, ground_transform_from_pose
from ..risk import DEFAULT_CLASSES, OUTSIDE_CLASS


@dataclass
class Obstacle:
    """Axis-aligned rectangle of one class moving along a timed polyline.

    ``waypoints`` rows are ``(t, x, y)`` with strictly increasing ``t``;
    before the first and after the last timestamp the obstacle holds still.
    """

    class_id: int
    size: tuple[float, float]
    waypoints: np.ndarray

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float).reshape(-1, 3)
        if wp.shape[0] == 0:
            raise ConfigError("obstacle needs at least one waypoint")
        if np.any(np.diff(wp[:, 0]) <= 0):
            raise ConfigError("obstacle waypoint times must be strictly increasing")
        if self.size[0] <= 0 or self.size[1] <= 0:
            raise ConfigError("obstacle size must be positive")
        self.waypoints = wp

    def position(self, t: float) -> tuple[float, float]:
        wp = self.waypoints
        return float(np.interp(t, wp[:, 0], wp[:, 1])), float(np.interp(t, wp[:, 0], wp[:, 2]))


@dataclass
class Scene:
    base_labels: np.ndarray
    resolution: float = 0.05
    obstacles: list[Obstacle] = field(default_factory=list)
    duration: float = 150.0
    origin: tuple[float, float] = (0.0, 0.0)
    class_names: dict[int, str] = field(default_factory=lambda: dict(DEFAULT_CLASSES))
    sample_region: tuple[float, float, float, float] | None = None
    ground_truth: object = None  # None, "composite" or list of (t, raster)
    name: str = "scene"
    template: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.base_labels = np.ascontiguousarray(self.base_labels, dtype=np.uint8)
        if self.base_labels.ndim != 2 or self.base_labels.size == 0:
            raise ConfigError("base_labels must be a non-empty 2-D raster")
        if self.resolution <= 0 or self.duration <= 0:
            raise ConfigError("scene resolution and duration must be > 0")
        self.class_names = {int(k): v for k, v in self.class_names.items()}
        self.class_names.setdefault(OUTSIDE_CLASS, "outside")
        if self.sample_region is None:
            self.sample_region = self.interior(12.0)
        xmin, ymin, xmax, ymax = self.bounds
        for ob in self.obstacles:
            pts = ob.waypoints[:, 1:]
            if (pts[:, 0].min() < xmin or pts[:, 0].max() > xmax
                    or pts[:, 1].min() < ymin or pts[:, 1].max() > ymax):
                raise ConfigError("obstacle path leaves the scene raster")
        self._pack()
        self._rects_cache = None

    # -- extents -----------------------------------------------------------
    @property
    def shape(self):
        return self.base_labels.shape

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """World extent ``(xmin, ymin, xmax, ymax)`` covered by the raster."""
        h, w = self.shape
        ox, oy = self.origin
        r = self.resolution
        return ox - 0.5 * r, oy - 0.5 * r, ox + (w - 0.5) * r, oy + (h - 0.5) * r

    def interior(self, margin: float):
        xmin, ymin, xmax, ymax = self.bounds
        if 2 * margin >= min(xmax - xmin, ymax - ymin):
            raise ConfigError("margin leaves no interior")
        return xmin + margin, ymin + margin, xmax - margin, ymax - margin

    @property
    def is_dynamic(self) -> bool:
        return bool(self.obstacles)

    # -- obstacles ---------------------------------------------------------
    def _pack(self):
        obs = self.obstacles
        counts = np.array([o.waypoints.shape[0] for o in obs], dtype=np.int64)
        starts = np.zeros(len(obs), dtype=np.int64)
        if len(obs):
            starts[1:] = np.cumsum(counts)[:-1]
            wp = np.vstack([o.waypoints for o in obs])
        else:
            wp = np.zeros((0, 3))
        self._times = np.ascontiguousarray(wp[:, 0])
        self._xs = np.ascontiguousarray(wp[:, 1])
        self._ys = np.ascontiguousarray(wp[:, 2])
        self._starts, self._counts = starts, counts
        self._half = np.array([[o.size[0] / 2.0, o.size[1] / 2.0] for o in obs]).reshape(-1, 2)
        self._classes = np.array([o.class_id for o in obs], dtype=np.uint8)

    def obstacle_positions(self, t: float) -> np.ndarray:
        if not self.obstacles:
            return np.zeros((0, 2))
        return kernels.interp_paths(self._times, self._xs, self._ys, self._starts, self._counts, float(t))

    def obstacle_rects(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Obstacle extents at ``t`` as ``[c0, c1, r0, r1]`` rows in cell units."""
        if self._rects_cache is not None and self._rects_cache[0] == t:
            return self._rects_cache[1], self._classes
        pos = self.obstacle_positions(t)
        ox, oy = self.origin
        r = self.resolution
        rects = np.empty((pos.shape[0], 4))
        rects[:, 0] = (pos[:, 0] - self._half[:, 0] - ox) / r
        rects[:, 1] = (pos[:, 0] + self._half[:, 0] - ox) / r
        rects[:, 2] = (pos[:, 1] - self._half[:, 1] - oy) / r
        rects[:, 3] = (pos[:, 1] + self._half[:, 1] - oy) / r
        self._rects_cache = (t, rects)
        return rects, self._classes

    def composite(self, t: float) -> np.ndarray:
        """Full label raster at scene time ``t`` (obstacles over base classes)."""
        out = self.base_labels.copy()
        if self.obstacles:
            rects, classes = self.obstacle_rects(t)
            eye = np.ascontiguousarray(np.eye(3)[:2])
            kernels.paint_rects(out, eye, eye, rects, classes)
        return out

    def ground_truth_labels(self, t: float) -> np.ndarray:
        if self.ground_truth is None:
            raise UnsupportedSceneError(f"scene {self.name!r} has no ground-truth labels")
        if isinstance(self.ground_truth, str):
            return self.composite(t)
        frames = self.ground_truth
        times = np.array([f[0] for f in frames])
        k = int(np.argmin(np.abs(times - t)))
        return frames[k][1]

    @property
    def has_ground_truth(self) -> bool:
        return self.ground_truth is not None

    def risk_fractions(self, table, gamma_r: int = 3, low_max: int = 1, t: float = 0.0,
                       region=None) -> dict[str, float]:
        """Area fractions of the sample region by risk band at time ``t``."""
        region = region or self.sample_region
        ox, oy = self.origin
        r = self.resolution
        c0 = int(np.ceil((region[0] - ox) / r))
        c1 = int(np.floor((region[2] - ox) / r))
        r0 = int(np.ceil((region[1] - oy) / r))
        r1 = int(np.floor((region[3] - oy) / r))
        risk = table.lut[self.composite(t)[r0:r1 + 1, c0:c1 + 1]]
        return {"high": float(np.mean(risk > gamma_r)), "low": float(np.mean(risk <= low_max)),
                "medium": float(np.mean((risk > low_max) & (risk <= gamma_r)))}


def render_labels(scene: Scene, pose: VehiclePose, cam: CameraModel, t: float) -> np.ndarray:
    """Class-id image seen by a nadir camera at ``pose`` and scene time ``t``."""
    tr = ground_transform_from_pose(pose, cam, scene.resolution, scene.origin)
    A = tr.affine()
    labels, inside = kernels.sample_nearest(scene.base_labels, scene.base_labels.view(bool), False,
                                            A, cam.height, cam.width, np.uint8(OUTSIDE_CLASS))
    if inside == 0:
        raise RenderError("camera footprint lies entirely outside the scene")
    if scene.obstacles:
        rects, classes = scene.obstacle_rects(t)
        kernels.paint_rects(labels, A, tr.inverse_affine(), rects, classes)
    return labels


def render_raster(raster: np.ndarray, scene: Scene, pose: VehiclePose, cam: CameraModel) -> np.ndarray:
    """Sample an arbitrary world-anchored raster (same grid as ``scene``) at ``pose``."""
    raster = np.ascontiguousarray(raster, dtype=np.uint8)
    if raster.shape != scene.shape:
        raise ConfigError("raster must share the scene grid")
    tr = ground_transform_from_pose(pose, cam, scene.resolution, scene.origin)
    out, inside = kernels.sample_nearest(raster, raster.view(bool), False, tr.affine(),
                                         cam.height, cam.width, np.uint8(OUTSIDE_CLASS))
    if inside == 0:
        raise RenderError("camera footprint lies entirely outside the scene")
    return out
