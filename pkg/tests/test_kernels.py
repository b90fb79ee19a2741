"""The numba kernels must agree exactly with the numpy fallback."""

import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from riskland import kernels

BACKENDS = kernels.available_backends()
pytestmark = pytest.mark.skipif("numba" not in BACKENDS, reason="numba not installed")
NP, NB = BACKENDS["numpy"], BACKENDS.get("numba")

small = st.tuples(st.integers(1, 20), st.integers(1, 20))


def _affine(scale, rot, tx, ty):
    c, s = np.cos(rot), np.sin(rot)
    A = np.array([[scale * c, -scale * s, tx], [scale * s, scale * c, ty], [0, 0, 1.0]])
    Ai = np.linalg.inv(A)
    return np.ascontiguousarray(A[:2]), np.ascontiguousarray(Ai[:2])


affines = st.builds(_affine, st.floats(0.3, 3.0), st.floats(-3.2, 3.2), st.floats(-10, 30), st.floats(-10, 30))


@given(hnp.arrays(np.float64, small, elements=st.floats(0, 4)), st.floats(0.3, 4.0))
def test_convolve(img, sigma):
    r = int(np.ceil(3 * sigma))
    k = np.exp(-0.5 * (np.arange(-r, r + 1) / sigma) ** 2)
    k /= k.sum()
    np.testing.assert_allclose(NB.convolve_separable(img, k), NP.convolve_separable(img, k), atol=1e-12)


@given(hnp.arrays(np.uint8, small, elements=st.integers(0, 4)), st.sampled_from([1, 3, 5, 9]))
def test_max_filter(img, size):
    np.testing.assert_array_equal(NB.max_filter(img, size), NP.max_filter(img, size))


@given(hnp.arrays(np.uint8, (24, 24), elements=st.integers(0, 4)), affines, st.booleans())
def test_sample_nearest(grid, aff, use_mask):
    A, _ = aff
    valid = np.random.default_rng(1).random(grid.shape) < 0.7
    a = NB.sample_nearest(grid, valid, use_mask, A, 9, 13, np.uint8(2))
    b = NP.sample_nearest(grid, valid, use_mask, A, 9, 13, np.uint8(2))
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1]


@given(hnp.arrays(np.uint8, small, elements=st.integers(0, 4)), affines)
def test_accumulate_max(local, aff):
    A, Ai = aff
    h, w = local.shape
    corners = np.array([[-0.5, -0.5, 1], [w - 0.5, -0.5, 1], [-0.5, h - 0.5, 1], [w - 0.5, h - 0.5, 1]]).T
    g = A @ corners
    c0, c1 = max(int(np.floor(g[0].min())), 0), min(int(np.ceil(g[0].max())), 31)
    r0, r1 = max(int(np.floor(g[1].min())), 0), min(int(np.ceil(g[1].max())), 31)
    out = []
    for mod in (NB, NP):
        grid = np.random.default_rng(2).integers(0, 5, size=(32, 32)).astype(np.uint8)
        valid = np.zeros((32, 32), dtype=bool)
        clipped = mod.accumulate_max(grid, valid, local, A, Ai, c0, c1, r0, r1)
        out.append((grid, valid, clipped))
    np.testing.assert_array_equal(out[0][0], out[1][0])
    np.testing.assert_array_equal(out[0][1], out[1][1])
    assert out[0][2] == out[1][2]


@given(affines, st.lists(st.tuples(st.floats(-5, 30), st.floats(0.5, 8), st.floats(-5, 30), st.floats(0.5, 8)),
                         min_size=1, max_size=4))
def test_paint_rects(aff, boxes):
    A, Ai = aff
    rects = np.array([[x, x + w, y, y + h] for x, w, y, h in boxes])
    classes = np.arange(4, 4 + len(boxes), dtype=np.uint8)
    a = np.zeros((15, 17), dtype=np.uint8)
    b = a.copy()
    NB.paint_rects(a, A, Ai, rects, classes)
    NP.paint_rects(b, A, Ai, rects, classes)
    np.testing.assert_array_equal(a, b)


@given(hnp.arrays(np.float64, small, elements=st.integers(0, 3).map(float)),
       st.floats(-2, 22), st.floats(-2, 22))
def test_argmin(v, cx, cy):
    assert NB.argmin_tiebreak(v, cx, cy) == NP.argmin_tiebreak(v, cx, cy)


@settings(max_examples=50)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=5), st.floats(-5, 30))
def test_interp_paths(counts, t):
    rng = np.random.default_rng(sum(counts))
    times = np.concatenate([np.cumsum(rng.uniform(0.5, 3, size=c)) for c in counts])
    xs, ys = rng.uniform(0, 50, size=times.size), rng.uniform(0, 50, size=times.size)
    counts = np.array(counts, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.int64)
    np.testing.assert_allclose(NB.interp_paths(times, xs, ys, starts, counts, t),
                               NP.interp_paths(times, xs, ys, starts, counts, t), atol=1e-12)


def test_env_flag_selects_numpy():
    code = "import riskland.kernels as k; print(k.BACKEND)"
    env = {"RISKLAND_DISABLE_NUMBA": "1", "PATH": "/usr/bin:/bin"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert kernels.BACKEND == "numba"
