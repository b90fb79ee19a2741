"""Downward pinhole camera, vehicle pose and local<->global ground transforms.

Conventions
-----------
* Image points are ``(x, y)`` = ``(column, row)`` with pixel centres on
  integer coordinates, so an ``W x H`` image spans ``[-0.5, W - 0.5]``.
* The world frame is raster aligned: world ``X`` grows with the global grid
  column and world ``Y`` with the grid row. ``z`` is altitude above the
  landing plane.
* A global grid is described by ``origin`` (world coordinates of the centre
  of cell ``(0, 0)``) and ``resolution`` (metres per cell).
* Yaw rotates the image ``x`` axis from world ``X`` towards world ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateTransformError, ProjectionError

_W_EPS = 1e-12


@dataclass(frozen=True)
class CameraModel:
    focal_length_px: float = 200.0
    principal_point: tuple[float, float] = (80.0, 60.0)
    image_size: tuple[int, int] = (161, 121)  # (width, height)

    def __post_init__(self):
        w, h = self.image_size
        if self.focal_length_px <= 0:
            raise ConfigError("focal_length_px must be > 0")
        if w <= 0 or h <= 0:
            raise ConfigError("image_size components must be > 0")
        cx, cy = self.principal_point
        if not (-0.5 < cx < w - 0.5 and -0.5 < cy < h - 0.5):
            raise ConfigError("principal_point must lie strictly inside the image")

    @property
    def width(self) -> int:
        return int(self.image_size[0])

    @property
    def height(self) -> int:
        return int(self.image_size[1])

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape ``(rows, cols)`` of an image from this camera."""
        return self.height, self.width

    @property
    def center(self) -> np.ndarray:
        return np.array(self.principal_point, dtype=float)

    def gsd(self, z: float) -> float:
        """Ground sample distance (metres per pixel) at altitude ``z``."""
        return z / self.focal_length_px


@dataclass(frozen=True)
class VehiclePose:
    position: tuple[float, float, float]
    yaw: float = 0.0

    def __post_init__(self):
        if self.position[2] < 0:
            raise ConfigError("altitude must be >= 0")

    @property
    def x(self) -> float:
        return float(self.position[0])

    @property
    def y(self) -> float:
        return float(self.position[1])

    @property
    def z(self) -> float:
        return float(self.position[2])


@dataclass(frozen=True)
class GroundTransform:
    """Map from local image pixels to global grid cells.

    Points map as ``dehomog((1 / scale) * H @ [x, y, 1])``. Transforms built
    from a pose carry ``H = scale * A`` with ``A`` affine, so the ``1/scale``
    factor normalises the homogeneous coordinate back to one.
    """

    homography: np.ndarray
    scale: float = 1.0
    _inverse: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        H = np.asarray(self.homography, dtype=float)
        if H.shape != (3, 3):
            raise ConfigError("homography must be 3x3")
        if self.scale == 0 or abs(np.linalg.det(H)) < 1e-300:
            raise DegenerateTransformError("ground transform is not invertible")
        object.__setattr__(self, "homography", H)
        object.__setattr__(self, "_inverse", np.linalg.inv(H))

    @property
    def matrix(self) -> np.ndarray:
        """The normalised 3x3 map ``(1/scale) * H``."""
        return self.homography / self.scale

    @property
    def is_affine(self) -> bool:
        M = self.matrix
        return abs(M[2, 0]) < 1e-15 and abs(M[2, 1]) < 1e-15 and abs(M[2, 2] - 1.0) < 1e-12

    def affine(self) -> np.ndarray:
        """2x3 local->global affine block (raises for projective maps)."""
        if not self.is_affine:
            raise ProjectionError("transform is projective; no affine block")
        return np.ascontiguousarray(self.matrix[:2, :])

    def inverse_affine(self) -> np.ndarray:
        """2x3 global->local affine block."""
        M = np.linalg.inv(self.matrix)
        M = M / M[2, 2]
        return np.ascontiguousarray(M[:2, :])

    def forward(self, p) -> np.ndarray:
        return _apply(self.homography / self.scale, p)

    def backward(self, q) -> np.ndarray:
        return _apply(self._inverse * self.scale, q)


def _apply(M, p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    flat = pts.reshape(-1, 2)
    hom = flat @ M[:, :2].T + M[:, 2]
    w = hom[:, 2]
    if np.any(np.abs(w) < _W_EPS):
        raise ProjectionError("point projects to the plane at infinity")
    out = hom[:, :2] / w[:, None]
    return out.reshape(pts.shape)


def _rot(yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s], [s, c]])


def ground_transform_from_pose(pose: VehiclePose, cam: CameraModel,
                               global_resolution: float = 0.05,
                               origin=(0.0, 0.0)) -> GroundTransform:
    """Transform taking image pixels of ``cam`` at ``pose`` to grid cells."""
    if pose.z <= 0:
        raise DegenerateTransformError("zero altitude gives a degenerate ground transform")
    if global_resolution <= 0:
        raise ConfigError("global_resolution must be > 0")
    lam = pose.z / cam.focal_length_px / global_resolution
    L = lam * _rot(pose.yaw)
    centre = np.array([(pose.x - origin[0]) / global_resolution,
                       (pose.y - origin[1]) / global_resolution])
    t = centre - L @ cam.center
    A = np.eye(3)
    A[:2, :2] = L
    A[:2, 2] = t
    return GroundTransform(lam * A, lam)


def project_local_to_global(p, t: GroundTransform) -> np.ndarray:
    return t.forward(p)


def project_global_to_local(q, t: GroundTransform) -> np.ndarray:
    return t.backward(q)


def meters_to_pixels(r: float, pose: VehiclePose, cam: CameraModel) -> float:
    if pose.z <= 0:
        raise DegenerateTransformError("pixel radius undefined at zero altitude")
    return r * cam.focal_length_px / pose.z


@dataclass(frozen=True)
class Footprint:
    center: tuple[float, float]
    width: float   # along the image x axis, metres
    height: float  # along the image y axis, metres
    yaw: float = 0.0

    @property
    def area(self) -> float:
        return self.width * self.height

    def corners(self) -> np.ndarray:
        hw, hh = self.width / 2.0, self.height / 2.0
        local = np.array([[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]])
        return local @ _rot(self.yaw).T + np.asarray(self.center)

    def bounds(self) -> tuple[float, float, float, float]:
        """Axis-aligned ``(xmin, ymin, xmax, ymax)`` of the rotated rectangle."""
        c = self.corners()
        return c[:, 0].min(), c[:, 1].min(), c[:, 0].max(), c[:, 1].max()


def footprint_on_ground(pose: VehiclePose, cam: CameraModel) -> Footprint:
    if pose.z <= 0:
        raise DegenerateTransformError("footprint undefined at zero altitude")
    g = cam.gsd(pose.z)
    # offset of the image rectangle centre from the principal point, in metres
    off = (np.array([(cam.width - 1) / 2.0, (cam.height - 1) / 2.0]) - cam.center) * g
    cx, cy = np.array([pose.x, pose.y]) + _rot(pose.yaw) @ off
    return Footprint((float(cx), float(cy)), cam.width * g, cam.height * g, pose.yaw)


def image_corners(cam: CameraModel) -> np.ndarray:
    w, h = cam.width, cam.height
    return np.array([[-0.5, -0.5], [w - 0.5, -0.5], [w - 0.5, h - 0.5], [-0.5, h - 0.5]])


def compose_affine(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """2x3 affine ``outer o inner``."""
    o = np.vstack([outer, [0.0, 0.0, 1.0]])
    i = np.vstack([inner, [0.0, 0.0, 1.0]])
    return np.ascontiguousarray((o @ i)[:2, :])
