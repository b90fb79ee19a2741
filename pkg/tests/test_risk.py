import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import naive_accumulate
from riskland.errors import EmptyViewError, RiskMappingError
from riskland.geometry import CameraModel, GroundTransform, VehiclePose
from riskland.risk import (DEFAULT_CLASSES, GlobalRiskMap, RiskTable, accumulate_global,
                           local_view, risk_from_labels, risk_to_image)

TABLE = RiskTable.default()
NAMES = {v: k for k, v in DEFAULT_CLASSES.items()}


def test_anchor_values():
    grass = np.full((8, 8), NAMES["grass"], dtype=np.uint8)
    assert not risk_from_labels(grass, TABLE).any()
    labels = grass.copy()
    labels[3, 4] = NAMES["person"]
    r = risk_from_labels(labels, TABLE)
    assert r[3, 4] == 4 and r.sum() == 4


def test_default_table():
    expected = {"grass": 0, "vegetation": 1, "pavement": 1, "bare_ground": 2, "building": 3,
                "water": 3, "vehicle": 4, "person": 4}
    for name, risk in expected.items():
        assert TABLE.risk[NAMES[name]] == risk


def test_lookup_oracle(rng):
    ids = np.array(sorted(TABLE.risk))
    labels = rng.choice(ids, size=(16, 16)).astype(np.uint8)
    out = risk_from_labels(labels, TABLE)
    for (i, j), v in np.ndenumerate(labels):
        assert out[i, j] == TABLE.risk[int(v)]
    assert out.shape == labels.shape


def test_unknown_class_names_the_id():
    labels = np.zeros((4, 4), dtype=np.uint8)
    labels[1, 1] = 42
    with pytest.raises(RiskMappingError, match="42"):
        risk_from_labels(labels, TABLE)


def test_table_validation():
    with pytest.raises(RiskMappingError):
        RiskTable({0: 5})
    with pytest.raises(RiskMappingError):
        RiskTable.from_names({0: "lava"}, {"grass": 0})


def _transform(scale, tx, ty, rot=0.0):
    c, s = np.cos(rot), np.sin(rot)
    A = np.array([[scale * c, -scale * s, tx], [scale * s, scale * c, ty], [0, 0, 1.0]])
    return GroundTransform(A)


local_maps = hnp.arrays(np.uint8, st.tuples(st.integers(1, 24), st.integers(1, 24)),
                        elements=st.integers(0, 4))


@given(local_maps, st.floats(0.3, 3.0), st.floats(-10, 30), st.floats(-10, 30), st.floats(-3.2, 3.2),
       st.integers(0, 2**31))
def test_accumulate_matches_oracle(local, scale, tx, ty, rot, seed):
    gm = GlobalRiskMap((32, 32))
    gm.grid[...] = np.random.default_rng(seed).integers(0, 5, size=(32, 32))
    before = gm.grid.copy()
    t = _transform(scale, tx, ty, rot)
    expected, touched = naive_accumulate(before, local, t.affine())
    accumulate_global(gm, local, t)
    np.testing.assert_array_equal(gm.grid, expected)
    np.testing.assert_array_equal(gm.initialized, touched)
    assert np.all(gm.grid >= before)


@given(local_maps, st.floats(0.3, 3.0), st.floats(-5, 20), st.floats(-5, 20))
def test_accumulate_idempotent_and_zero_never_lowers(local, scale, tx, ty):
    gm = GlobalRiskMap((32, 32))
    t = _transform(scale, tx, ty)
    accumulate_global(gm, local, t)
    once = gm.grid.copy()
    accumulate_global(gm, local, t)
    np.testing.assert_array_equal(gm.grid, once)
    accumulate_global(gm, np.zeros_like(local), t)
    np.testing.assert_array_equal(gm.grid, once)


def test_conservatism_every_source_pixel_dominated(rng):
    gm = GlobalRiskMap((64, 64))
    local = rng.integers(0, 5, size=(20, 30)).astype(np.uint8)
    t = _transform(0.7, 10.3, 12.8, 0.3)
    accumulate_global(gm, local, t)
    A = t.affine()
    for (y, x), v in np.ndenumerate(local):
        c = int(np.floor(A[0, 0] * x + A[0, 1] * y + A[0, 2] + 0.5))
        r = int(np.floor(A[1, 0] * x + A[1, 1] * y + A[1, 2] + 0.5))
        assert gm.grid[r, c] >= v


def test_vehicle_memory_persists():
    gm = GlobalRiskMap((20, 20))
    t = _transform(1.0, 0.0, 0.0)
    frame = np.zeros((20, 20), dtype=np.uint8)
    frame[5:8, 5:9] = 4
    accumulate_global(gm, frame, t)
    accumulate_global(gm, np.zeros_like(frame), t)
    assert np.all(gm.grid[5:8, 5:9] == 4)


def test_clipped_pixels_counted():
    gm = GlobalRiskMap((10, 10))
    accumulate_global(gm, np.ones((10, 10), dtype=np.uint8), _transform(1.0, 5.0, 0.0))
    assert gm.clipped == 50


def test_uninitialized_default_on_read():
    gm = GlobalRiskMap((10, 10), default_risk=2)
    assert np.all(gm.values() == 2)
    assert not gm.grid.any()


CAM = CameraModel(10.0, (4.0, 3.0), (9, 7))


def test_local_view_uniform():
    gm = GlobalRiskMap((100, 100), resolution=0.1)
    gm.grid[...] = 3
    gm.initialized[...] = True
    view = local_view(gm, VehiclePose((5.0, 5.0, 2.0)), CAM)
    assert view.shape == CAM.shape and np.all(view == 3)


def test_local_view_block_at_predicted_pixel():
    gm = GlobalRiskMap((100, 100), resolution=0.1)
    gm.initialized[...] = True
    gm.grid[48:53, 58:63] = 4  # 0.5 m block centred on world (6.0, 5.0)
    pose = VehiclePose((5.0, 5.0, 1.0))  # 0.1 m per pixel: one cell per pixel
    view = local_view(gm, pose, CAM)
    ys, xs = np.nonzero(view == 4)
    # the block centre is 1 m = 10 px right of the principal point, outside the view
    assert xs.size == 0
    # pixel (x, y) sees cell (56 + x, 47 + y) from above the block centre
    view = local_view(gm, VehiclePose((6.0, 5.0, 1.0)), CAM)
    ys, xs = np.nonzero(view == 4)
    assert set(xs) == {2, 3, 4, 5, 6} and set(ys) == {1, 2, 3, 4, 5}


def test_local_view_fixed_point(rng):
    gm = GlobalRiskMap((80, 80), resolution=0.1)
    cam = CameraModel(20.0, (10.0, 8.0), (21, 17))
    pose = VehiclePose((4.0, 4.0, 2.0))  # local pixel pitch = grid pitch
    frame = rng.integers(0, 5, size=cam.shape).astype(np.uint8)
    accumulate_global(gm, frame, gm.transform_for(pose, cam))
    np.testing.assert_array_equal(local_view(gm, pose, cam), frame)
    accumulate_global(gm, local_view(gm, pose, cam), gm.transform_for(pose, cam))
    np.testing.assert_array_equal(local_view(gm, pose, cam), frame)


def test_local_view_unseen_cells_use_default():
    gm = GlobalRiskMap((50, 50), resolution=0.1, default_risk=2)
    assert np.all(local_view(gm, VehiclePose((2.5, 2.5, 1.0)), CAM) == 2)


def test_empty_view():
    gm = GlobalRiskMap((10, 10), resolution=0.1)
    with pytest.raises(EmptyViewError):
        local_view(gm, VehiclePose((500.0, 500.0, 1.0)), CAM)


def test_risk_image():
    img = risk_to_image(np.array([[0, 1, 4]]))
    assert img.tolist() == [[0, 63, 252]]
