import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskland.errors import ConfigError, DegenerateTransformError, ProjectionError
from riskland.geometry import (CameraModel, GroundTransform, VehiclePose, compose_affine,
                               footprint_on_ground, ground_transform_from_pose, image_corners,
                               meters_to_pixels, project_global_to_local, project_local_to_global)

CAM640 = CameraModel(800.0, (319.5, 239.5), (640, 480))


def test_camera_validation():
    with pytest.raises(ConfigError):
        CameraModel(0.0)
    with pytest.raises(ConfigError):
        CameraModel(100.0, (10, 10), (0, 10))
    with pytest.raises(ConfigError):
        CameraModel(100.0, (200.0, 10.0), (100, 100))
    with pytest.raises(ConfigError):
        VehiclePose((0, 0, -1))


def test_identity_scale_at_origin():
    cam = CAM640
    t = ground_transform_from_pose(VehiclePose((0, 0, cam.focal_length_px * 0.05)), cam, 0.05)
    assert t.scale == pytest.approx(1.0)
    A = t.affine()
    np.testing.assert_allclose(A[:, :2], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(t.forward(cam.center), [0.0, 0.0], atol=1e-12)


def test_doubling_altitude_doubles_scale():
    a = ground_transform_from_pose(VehiclePose((3, 4, 10)), CAM640)
    b = ground_transform_from_pose(VehiclePose((3, 4, 20)), CAM640)
    assert b.scale == pytest.approx(2 * a.scale)


def _pinhole_ground(cam, pose, p):
    # back-project pixel p through the nadir pinhole onto the plane z = 0
    ray = np.array([(p[0] - cam.principal_point[0]) / cam.focal_length_px,
                    (p[1] - cam.principal_point[1]) / cam.focal_length_px])
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    off = np.array([c * ray[0] - s * ray[1], s * ray[0] + c * ray[1]]) * pose.z
    return np.array([pose.x, pose.y]) + off


@pytest.mark.parametrize("yaw", [0.0, 0.4])
def test_corner_projection_oracle(yaw):
    pose = VehiclePose((10.0, -4.0, 30.0), yaw)
    res = 0.05
    t = ground_transform_from_pose(pose, CAM640, res)
    assert t.scale == pytest.approx((30.0 / 800.0) / res)
    corners = np.array([[0, 0], [639, 0], [0, 479], [639, 479], [319.5, 239.5]], dtype=float)
    for p in corners:
        world = _pinhole_ground(CAM640, pose, p)
        np.testing.assert_allclose(t.forward(p), world / res, atol=1e-9)


def test_identity_transform():
    t = GroundTransform(np.eye(3), 1.0)
    np.testing.assert_allclose(project_local_to_global((12, 7), t), (12, 7))


def test_pure_scale_convention():
    t = GroundTransform(np.diag([1.0, 1.0, 2.0]), 2.0)
    np.testing.assert_allclose(project_local_to_global((10, 10), t), (5, 5))
    np.testing.assert_allclose(project_global_to_local((5, 5), t), (10, 10))


def test_plane_at_infinity_raises():
    H = np.array([[1.0, 0, 0], [0, 1, 0], [1, 0, 0.5]])
    t = GroundTransform(H)
    with pytest.raises(ProjectionError):
        t.forward((-0.5, 3.0))
    with pytest.raises(ProjectionError):
        t.affine()


def test_degenerate():
    with pytest.raises(DegenerateTransformError):
        GroundTransform(np.zeros((3, 3)))
    with pytest.raises(DegenerateTransformError):
        ground_transform_from_pose(VehiclePose((0, 0, 0)), CAM640)
    with pytest.raises(DegenerateTransformError):
        meters_to_pixels(1.0, VehiclePose((0, 0, 0)), CAM640)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.5, 80), st.floats(-math.pi, math.pi),
       st.floats(-500, 500), st.floats(-500, 500))
def test_round_trip(x, y, z, yaw, px, py):
    t = ground_transform_from_pose(VehiclePose((x, y, z), yaw), CAM640, 0.05)
    q = project_local_to_global((px, py), t)
    np.testing.assert_allclose(project_global_to_local(q, t), (px, py), atol=1e-9)
    inv = compose_affine(t.inverse_affine(), t.affine())
    np.testing.assert_allclose(inv, np.eye(3)[:2], atol=1e-9)


def test_yaw_zero_is_similarity():
    A = ground_transform_from_pose(VehiclePose((1, 2, 17)), CAM640).affine()
    assert A[0, 1] == 0 and A[1, 0] == 0 and A[0, 0] == A[1, 1]


def test_meters_to_pixels():
    assert meters_to_pixels(0.0, VehiclePose((0, 0, 40)), CAM640) == 0
    assert meters_to_pixels(1.0, VehiclePose((0, 0, 40)), CAM640) == pytest.approx(20.0)
    a = meters_to_pixels(2.0, VehiclePose((0, 0, 30)), CAM640)
    assert meters_to_pixels(2.0, VehiclePose((0, 0, 15)), CAM640) == pytest.approx(2 * a)


@given(st.floats(0.01, 10), st.floats(0.1, 100), st.floats(0.1, 100))
def test_meters_to_pixels_properties(r, z1, z2):
    pose = VehiclePose((0, 0, z1))
    assert meters_to_pixels(r, pose, CAM640) * CAM640.gsd(z1) == pytest.approx(r, abs=1e-9)
    if z1 < z2:
        assert meters_to_pixels(r, pose, CAM640) > meters_to_pixels(r, VehiclePose((0, 0, z2)), CAM640)


def test_footprint():
    fp = footprint_on_ground(VehiclePose((0, 0, 800 * 0.05)), CAM640)
    assert fp.width == pytest.approx(32.0) and fp.height == pytest.approx(24.0)
    assert footprint_on_ground(VehiclePose((0, 0, 1e-6)), CAM640).area < 1e-6
    rot = footprint_on_ground(VehiclePose((0, 0, 40), math.pi / 2), CAM640)
    xmin, ymin, xmax, ymax = rot.bounds()
    assert xmax - xmin == pytest.approx(24.0) and ymax - ymin == pytest.approx(32.0)


def test_footprint_matches_projected_corners():
    cam = CameraModel()
    pose = VehiclePose((5.0, 7.0, 25.0))
    t = ground_transform_from_pose(pose, cam, 0.05)
    g = t.forward(image_corners(cam)) * 0.05
    xmin, ymin, xmax, ymax = footprint_on_ground(pose, cam).bounds()
    np.testing.assert_allclose([g[:, 0].min(), g[:, 1].min(), g[:, 0].max(), g[:, 1].max()],
                               [xmin, ymin, xmax, ymax], atol=1e-9)
