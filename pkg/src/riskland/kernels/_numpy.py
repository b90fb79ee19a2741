"""Vectorised numpy implementations of the grid kernels.

These are the reference fallback for the numba versions in ``_numba`` and
must stay behaviourally identical to them. Coordinates are ``(x, y)`` =
``(column, row)``; nearest-neighbour rounding is ``floor(v + 0.5)``.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def convolve_separable(img, k):
    r = k.size // 2
    h, w = img.shape
    padded = np.pad(img, ((0, 0), (r, r)), mode="edge")
    tmp = np.zeros((h, w))
    for t in range(k.size):
        tmp += k[t] * padded[:, t:t + w]
    padded = np.pad(tmp, ((r, r), (0, 0)), mode="edge")
    out = np.zeros((h, w))
    for t in range(k.size):
        out += k[t] * padded[t:t + h, :]
    return out


def max_filter(img, size):
    r = size // 2
    if r == 0:
        return img.copy()
    padded = np.pad(img, ((0, 0), (r, r)), mode="edge")
    rows = sliding_window_view(padded, size, axis=1).max(axis=-1)
    padded = np.pad(rows, ((r, r), (0, 0)), mode="edge")
    return np.ascontiguousarray(sliding_window_view(padded, size, axis=0).max(axis=-1))


def _pixel_grid(h, w):
    ys, xs = np.mgrid[0:h, 0:w]
    return xs.astype(np.float64), ys.astype(np.float64)


def _nearest(A, xs, ys):
    gx = A[0, 0] * xs + A[0, 1] * ys + A[0, 2]
    gy = A[1, 0] * xs + A[1, 1] * ys + A[1, 2]
    return np.floor(gx + 0.5).astype(np.int64), np.floor(gy + 0.5).astype(np.int64)


def sample_nearest(grid, valid, use_mask, A, out_h, out_w, fill):
    xs, ys = _pixel_grid(out_h, out_w)
    ci, ri = _nearest(A, xs, ys)
    gh, gw = grid.shape
    inside = (ci >= 0) & (ci < gw) & (ri >= 0) & (ri < gh)
    out = np.full((out_h, out_w), fill, dtype=grid.dtype)
    vals = grid[ri[inside], ci[inside]]
    if use_mask:
        vals = np.where(valid[ri[inside], ci[inside]], vals, fill).astype(grid.dtype)
    out[inside] = vals
    return out, int(inside.sum())


def accumulate_max(grid, valid, local, A, Ainv, c0, c1, r0, r1):
    h, w = local.shape
    gh, gw = grid.shape
    xs, ys = _pixel_grid(h, w)
    ci, ri = _nearest(A, xs, ys)
    inside = (ci >= 0) & (ci < gw) & (ri >= 0) & (ri < gh)
    clipped = int(inside.size - inside.sum())
    np.maximum.at(grid, (ri[inside], ci[inside]), local[inside])
    valid[ri[inside], ci[inside]] = True
    if c1 >= c0 and r1 >= r0:
        gys, gxs = np.mgrid[r0:r1 + 1, c0:c1 + 1]
        li, lj = _nearest(Ainv, gxs.astype(np.float64), gys.astype(np.float64))
        hit = (li >= 0) & (li < w) & (lj >= 0) & (lj < h)
        rows, cols = gys[hit], gxs[hit]
        grid[rows, cols] = np.maximum(grid[rows, cols], local[lj[hit], li[hit]])
        valid[rows, cols] = True
    return clipped


def paint_rects(labels, A, Ainv, rects, classes):
    h, w = labels.shape
    for n in range(rects.shape[0]):
        c0, c1, r0, r1 = rects[n]
        corners = np.array([[c0 - 1.0, r0 - 1.0], [c1 + 1.0, r0 - 1.0],
                            [c0 - 1.0, r1 + 1.0], [c1 + 1.0, r1 + 1.0]])
        u = Ainv[0, 0] * corners[:, 0] + Ainv[0, 1] * corners[:, 1] + Ainv[0, 2]
        v = Ainv[1, 0] * corners[:, 0] + Ainv[1, 1] * corners[:, 1] + Ainv[1, 2]
        x0 = max(int(np.floor(u.min())), 0)
        x1 = min(int(np.ceil(u.max())), w - 1)
        y0 = max(int(np.floor(v.min())), 0)
        y1 = min(int(np.ceil(v.max())), h - 1)
        if x1 < x0 or y1 < y0:
            continue
        ys, xs = np.mgrid[y0:y1 + 1, x0:x1 + 1]
        ci, ri = _nearest(A, xs.astype(np.float64), ys.astype(np.float64))
        hit = (ci >= c0) & (ci <= c1) & (ri >= r0) & (ri <= r1)
        labels[ys[hit], xs[hit]] = classes[n]


def argmin_tiebreak(V, cx, cy):
    h, w = V.shape
    best = V.min()
    rows, cols = np.nonzero(V == best)
    d2 = (cols - cx) ** 2 + (rows - cy) ** 2
    # lexsort keys: last is primary
    order = np.lexsort((cols, rows, d2))
    k = order[0]
    return int(cols[k]), int(rows[k])


def interp_paths(times, xs, ys, starts, counts, t):
    n = starts.size
    out = np.empty((n, 2))
    for k in range(n):
        s, m = starts[k], counts[k]
        out[k, 0] = np.interp(t, times[s:s + m], xs[s:s + m])
        out[k, 1] = np.interp(t, times[s:s + m], ys[s:s + m])
    return out
