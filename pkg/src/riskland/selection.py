"""Landing point selection, temporal averaging and consistency tracking."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ConfigError
from .geometry import CameraModel, GroundTransform, VehiclePose, meters_to_pixels
from .risk import R_MAX


@dataclass(frozen=True)
class SelectionWeights:
    alpha: float = 1.0
    beta: float = 0.04

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ConfigError("weights need alpha >= 0, beta >= 0 and alpha + beta > 0")

    @classmethod
    def normalized(cls, cam: CameraModel, alpha: float = 1.0) -> "SelectionWeights":
        """beta such that the distance term at the farthest corner equals alpha * R_MAX."""
        corners = np.array([[0, 0], [cam.width - 1, 0], [0, cam.height - 1],
                            [cam.width - 1, cam.height - 1]], dtype=float)
        far = np.max(np.linalg.norm(corners - cam.center, axis=1))
        return cls(alpha, alpha * R_MAX / far)


@lru_cache(maxsize=16)
def _distance_grid(shape, cx, cy):
    ys, xs = np.mgrid[0:shape[0], 0:shape[1]]
    d = np.sqrt((xs - cx) ** 2 + (ys - cy) ** 2)
    d.setflags(write=False)
    return d


def distance_map(shape, c) -> np.ndarray:
    return _distance_grid(tuple(shape), float(c[0]), float(c[1]))


def weighted_map(rf: np.ndarray, c, w: SelectionWeights) -> np.ndarray:
    """Cost ``alpha * rf + beta * |p - c|`` per pixel."""
    return w.alpha * np.asarray(rf, dtype=float) + w.beta * distance_map(rf.shape, c)


def select_landing_point(v: np.ndarray, c=None) -> tuple[int, int]:
    """Global minimiser of ``v`` as ``(x, y)``.

    Ties go to the pixel closest to ``c`` (default: the grid centre), then to
    the first in row-major order.
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.size == 0:
        raise ConfigError("cannot select from an empty grid")
    if c is None:
        c = ((v.shape[1] - 1) / 2.0, (v.shape[0] - 1) / 2.0)
    x, y = kernels.argmin_tiebreak(v, float(c[0]), float(c[1]))
    return int(x), int(y)


@dataclass
class ConsistencyState:
    counter: int
    is_consistent: bool
    tau: float
    in_safety_area: bool
    distance: float


@dataclass
class LandingTracker:
    """Queue of recent candidates plus the safety-area consistency counter.

    When a transform is supplied to :meth:`push`, candidates are stored in
    global-grid coordinates and re-projected into the current image before
    averaging, so camera motion does not smear the average.
    """

    queue_length: int = 10
    required_steps: int = 15
    safety_radius_m: float = 1.0
    queue: deque = field(default_factory=deque)
    average: np.ndarray | None = None
    counter: int = 0

    def __post_init__(self):
        if self.queue_length < 1 or self.required_steps < 1 or self.safety_radius_m <= 0:
            raise ConfigError("tracker needs queue_length >= 1, required_steps >= 1 and safety_radius_m > 0")

    def push(self, p, transform: GroundTransform | None = None) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        self.queue.append(transform.forward(p) if transform is not None else p)
        while len(self.queue) > self.queue_length:
            self.queue.popleft()
        pts = np.array(self.queue)
        if transform is not None:
            pts = transform.backward(pts)
        self.average = pts.mean(axis=0)
        return self.average

    def update(self, p_avg, c, z: float, cam: CameraModel) -> ConsistencyState:
        tau = meters_to_pixels(self.safety_radius_m, VehiclePose((0.0, 0.0, z)), cam)
        d = float(np.hypot(p_avg[0] - c[0], p_avg[1] - c[1]))
        inside = d < tau
        self.counter = self.counter + 1 if inside else 0
        return ConsistencyState(self.counter, self.counter >= self.required_steps, tau, inside, d)

    def reset(self):
        self.queue.clear()
        self.average = None
        self.counter = 0


def push_and_average(tracker: LandingTracker, p, transform: GroundTransform | None = None) -> np.ndarray:
    return tracker.push(p, transform)


def update_consistency(tracker: LandingTracker, p_avg, c, z: float, cam: CameraModel) -> ConsistencyState:
    if z <= 0:
        raise ConfigError("consistency check needs z > 0")
    return tracker.update(p_avg, c, z, cam)
