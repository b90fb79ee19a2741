"""numba-compiled grid kernels. Same contracts as ``_numpy``."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def convolve_separable(img, k):
    h, w = img.shape
    n = k.size
    r = n // 2
    row = np.empty(w + 2 * r)
    tmp = np.empty((h + 2 * r, w))
    for i in range(h):
        for j in range(w + 2 * r):
            jj = min(max(j - r, 0), w - 1)
            row[j] = img[i, jj]
        for j in range(w):
            s = 0.0
            for t in range(n):
                s += k[t] * row[j + t]
            tmp[i + r, j] = s
    for i in range(r):
        for j in range(w):
            tmp[i, j] = tmp[r, j]
            tmp[h + r + i, j] = tmp[h + r - 1, j]
    out = np.zeros((h, w))
    for i in range(h):
        for t in range(n):
            kt = k[t]
            for j in range(w):
                out[i, j] += kt * tmp[i + t, j]
    return out


@njit(cache=True)
def max_filter(img, size):
    h, w = img.shape
    r = size // 2
    tmp = np.empty_like(img)
    for i in range(h):
        for j in range(w):
            m = img[i, max(j - r, 0)]
            for jj in range(max(j - r, 0), min(j + r, w - 1) + 1):
                if img[i, jj] > m:
                    m = img[i, jj]
            tmp[i, j] = m
    out = np.empty_like(img)
    for i in range(h):
        lo = max(i - r, 0)
        hi = min(i + r, h - 1)
        for j in range(w):
            m = tmp[lo, j]
            for ii in range(lo, hi + 1):
                if tmp[ii, j] > m:
                    m = tmp[ii, j]
            out[i, j] = m
    return out


@njit(cache=True)
def sample_nearest(grid, valid, use_mask, A, out_h, out_w, fill):
    gh, gw = grid.shape
    out = np.empty((out_h, out_w), dtype=grid.dtype)
    inside = 0
    for y in range(out_h):
        for x in range(out_w):
            fx = float(x)
            fy = float(y)
            c = int(math.floor(A[0, 0] * fx + A[0, 1] * fy + A[0, 2] + 0.5))
            r = int(math.floor(A[1, 0] * fx + A[1, 1] * fy + A[1, 2] + 0.5))
            if c >= 0 and c < gw and r >= 0 and r < gh:
                inside += 1
                if use_mask and not valid[r, c]:
                    out[y, x] = fill
                else:
                    out[y, x] = grid[r, c]
            else:
                out[y, x] = fill
    return out, inside


@njit(cache=True)
def accumulate_max(grid, valid, local, A, Ainv, c0, c1, r0, r1):
    h, w = local.shape
    gh, gw = grid.shape
    clipped = 0
    for y in range(h):
        for x in range(w):
            fx = float(x)
            fy = float(y)
            c = int(math.floor(A[0, 0] * fx + A[0, 1] * fy + A[0, 2] + 0.5))
            r = int(math.floor(A[1, 0] * fx + A[1, 1] * fy + A[1, 2] + 0.5))
            if c >= 0 and c < gw and r >= 0 and r < gh:
                if local[y, x] > grid[r, c]:
                    grid[r, c] = local[y, x]
                valid[r, c] = True
            else:
                clipped += 1
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            fc = float(c)
            fr = float(r)
            i = int(math.floor(Ainv[0, 0] * fc + Ainv[0, 1] * fr + Ainv[0, 2] + 0.5))
            j = int(math.floor(Ainv[1, 0] * fc + Ainv[1, 1] * fr + Ainv[1, 2] + 0.5))
            if i >= 0 and i < w and j >= 0 and j < h:
                if local[j, i] > grid[r, c]:
                    grid[r, c] = local[j, i]
                valid[r, c] = True
    return clipped


@njit(cache=True)
def paint_rects(labels, A, Ainv, rects, classes):
    h, w = labels.shape
    for n in range(rects.shape[0]):
        c0 = rects[n, 0]
        c1 = rects[n, 1]
        r0 = rects[n, 2]
        r1 = rects[n, 3]
        umin = np.inf
        umax = -np.inf
        vmin = np.inf
        vmax = -np.inf
        for k in range(4):
            gc = c0 - 1.0 if k % 2 == 0 else c1 + 1.0
            gr = r0 - 1.0 if k < 2 else r1 + 1.0
            u = Ainv[0, 0] * gc + Ainv[0, 1] * gr + Ainv[0, 2]
            v = Ainv[1, 0] * gc + Ainv[1, 1] * gr + Ainv[1, 2]
            umin = min(umin, u)
            umax = max(umax, u)
            vmin = min(vmin, v)
            vmax = max(vmax, v)
        x0 = max(int(math.floor(umin)), 0)
        x1 = min(int(math.ceil(umax)), w - 1)
        y0 = max(int(math.floor(vmin)), 0)
        y1 = min(int(math.ceil(vmax)), h - 1)
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                fx = float(x)
                fy = float(y)
                c = math.floor(A[0, 0] * fx + A[0, 1] * fy + A[0, 2] + 0.5)
                r = math.floor(A[1, 0] * fx + A[1, 1] * fy + A[1, 2] + 0.5)
                if c >= c0 and c <= c1 and r >= r0 and r <= r1:
                    labels[y, x] = classes[n]


@njit(cache=True)
def argmin_tiebreak(V, cx, cy):
    h, w = V.shape
    bx = 0
    by = 0
    best = V[0, 0]
    bd = (0.0 - cx) ** 2 + (0.0 - cy) ** 2
    for y in range(h):
        for x in range(w):
            v = V[y, x]
            if v < best:
                best = v
                bx = x
                by = y
                bd = (x - cx) ** 2 + (y - cy) ** 2
            elif v == best:
                d = (x - cx) ** 2 + (y - cy) ** 2
                if d < bd:
                    bx = x
                    by = y
                    bd = d
    return bx, by


@njit(cache=True)
def interp_paths(times, xs, ys, starts, counts, t):
    n = starts.size
    out = np.empty((n, 2))
    for k in range(n):
        s = starts[k]
        m = counts[k]
        if t <= times[s]:
            out[k, 0] = xs[s]
            out[k, 1] = ys[s]
            continue
        last = s + m - 1
        if t >= times[last]:
            out[k, 0] = xs[last]
            out[k, 1] = ys[last]
            continue
        # first index with times[i] > t
        lo = s
        hi = last
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if times[mid] <= t:
                lo = mid
            else:
                hi = mid
        f = (t - times[lo]) / (times[hi] - times[lo])
        out[k, 0] = xs[lo] + f * (xs[hi] - xs[lo])
        out[k, 1] = ys[lo] + f * (ys[hi] - ys[lo])
    return out
