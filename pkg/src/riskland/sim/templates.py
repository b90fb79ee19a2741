"""Procedural desk-scale scenes, deterministic per seed.

All templates share one recipe: hazards (vehicles, people) sit and move only
on paved areas, grass strips at least 6 m wide stay clear, and traffic builds
up over time. Everything present at ``t = 0`` stays put while new arrivals
drive or walk in from the margins and stop in free spots, so the hazard set
inside the sample region only grows.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from .scene import Obstacle, Scene

GRASS, VEGETATION, PAVEMENT, BARE, BUILDING, WATER, VEHICLE, PERSON = range(8)

SIZE_M = 60.0
RESOLUTION = 0.05
MARGIN = 14.0


class _Builder:
    def __init__(self, seed: int, base: int = GRASS, size_m: float = SIZE_M, res: float = RESOLUTION):
        self.rng = np.random.default_rng(seed)
        self.res = res
        self.size = size_m
        n = int(round(size_m / res))
        self.labels = np.full((n, n), base, dtype=np.uint8)
        self.obstacles: list[Obstacle] = []

    def _idx(self, v):
        return int(np.clip(round(v / self.res), 0, self.labels.shape[0]))

    def rect(self, x0, y0, x1, y1, cls):
        self.labels[self._idx(y0):self._idx(y1), self._idx(x0):self._idx(x1)] = cls

    def disk(self, cx, cy, r, cls):
        n = self.labels.shape[0]
        ys, xs = np.ogrid[0:n, 0:n]
        m = (xs * self.res - cx) ** 2 + (ys * self.res - cy) ** 2 <= r * r
        self.labels[m] = cls

    def static(self, cls, w, h, x, y):
        self.obstacles.append(Obstacle(cls, (w, h), np.array([[0.0, x, y]])))

    def path(self, cls, w, h, t0, pts, speed):
        """Obstacle waiting at ``pts[0]`` until ``t0``, then moving at ``speed``."""
        wp = [(0.0, *pts[0])] if t0 > 0 else []
        t = t0
        wp.append((t, *pts[0]))
        for a, b in zip(pts[:-1], pts[1:]):
            d = math.hypot(b[0] - a[0], b[1] - a[1])
            if d <= 1e-9:
                continue
            t += d / speed
            wp.append((t, *b))
        self.obstacles.append(Obstacle(cls, (w, h), np.array(wp)))

    def scene(self, name, template, ground_truth=False, duration=150.0) -> Scene:
        lo, hi = -0.5 * self.res + MARGIN, self.size - 0.5 * self.res - MARGIN
        return Scene(self.labels, self.res, self.obstacles, duration, (0.0, 0.0),
                     sample_region=(lo, lo, hi, hi), ground_truth="composite" if ground_truth else None,
                     name=name, template=template)


def _lane_slots(rng, length_range, width, gap_range, extent):
    """Bumper-to-bumper slots ``(s_centre, length, width)`` from the stop line back."""
    out, s = [], float(rng.uniform(*gap_range))
    while True:
        ln = float(rng.uniform(*length_range))
        if s + ln > extent:
            return out
        out.append((s + ln / 2.0, ln, width))
        s += ln + float(rng.uniform(*gap_range))


def _queue_lane(b: _Builder, to_xy, horizontal, slots, n_static, entry_s, t_first, t_step, speed):
    """First ``n_static`` slots are parked at t=0; the rest arrive from ``entry_s``."""
    t = t_first
    for k, (s, ln, wd) in enumerate(slots):
        w, h = (ln, wd) if horizontal else (wd, ln)
        if k < n_static:
            b.static(VEHICLE, w, h, *to_xy(s))
            continue
        b.path(VEHICLE, w, h, t, [to_xy(entry_s), to_xy(s)], speed)
        t += t_step * float(b.rng.uniform(0.7, 1.3))


def park_road(seed: int, ground_truth=False) -> Scene:
    """Park lawns crossed by three two-lane roads with growing traffic jams."""
    b = _Builder(seed)
    rng = b.rng
    lane_w = 3.2
    for k, y0 in enumerate((15.8, 29.2, 42.6)):
        b.rect(0, y0, SIZE_M, y0 + 2 * lane_w, PAVEMENT)
        for lane in range(2):
            yc = y0 + lane_w * (lane + 0.5)
            east = (k + lane) % 2 == 0
            stop = 54.0 if east else 6.0

            def to_xy(s, stop=stop, east=east, yc=yc):
                return (stop - s if east else stop + s, yc)

            slots = _lane_slots(rng, (4.4, 6.8), 2.6, (0.3, 0.7), 48.0)
            back = float(rng.uniform(36.0, 40.0))  # initial queue reaches this far back
            n_static = sum(1 for s, ln, _ in slots if s + ln / 2 <= back)
            _queue_lane(b, to_xy, True, slots, n_static, 49.5, float(rng.uniform(1, 4)), 4.0, 7.0)
    # a few trees and a pond outside the sample region
    for _ in range(6):
        x = float(rng.choice([rng.uniform(2, 11), rng.uniform(49, 58)]))
        b.disk(x, float(rng.uniform(24.5, 27.5)), float(rng.uniform(0.8, 1.4)), VEGETATION)
    b.disk(float(rng.uniform(4, 8)), float(rng.uniform(37, 40)), 2.0, WATER)
    return b.scene(f"park+road-{seed}", "park+road", ground_truth)


def _crowd_band(b: _Builder, x0, x1, y0, y1, fill, gap=(0.35, 0.6), size=(1.0, 1.6)):
    """Grid of person groups over a band; returns (static spots, free spots)."""
    rng = b.rng
    spots = []
    y = y0 + 0.3
    while True:
        hgt = float(rng.uniform(*size))
        if y + hgt > y1 - 0.3:
            break
        x = x0 + 0.3
        while True:
            wid = float(rng.uniform(*size))
            if x + wid > x1 - 0.3:
                break
            spots.append((x + wid / 2, y + hgt / 2, wid, hgt))
            x += wid + float(rng.uniform(*gap))
        y += hgt + float(rng.uniform(*gap))
    taken = rng.random(len(spots)) < fill
    return [s for s, t in zip(spots, taken) if t], [s for s, t in zip(spots, taken) if not t]


def plaza_pedestrians(seed: int, ground_truth=False) -> Scene:
    """Paved plaza with lawn strips; crowds stand around and more people gather."""
    b = _Builder(seed, base=PAVEMENT)
    rng = b.rng
    lawns = [(19.0, 25.5), (34.0, 40.5)]
    for y0, y1 in lawns:
        b.rect(0, y0, SIZE_M, y1, GRASS)
    b.rect(0, 50.0, SIZE_M, SIZE_M, GRASS)
    b.rect(0, 0, SIZE_M, 8.0, GRASS)
    b.disk(6.0, 30.0, 2.5, WATER)  # fountain in the margin
    bands = [(8.0, 19.0), (25.5, 34.0), (40.5, 50.0)]
    t_next = {k: float(rng.uniform(0.5, 2.0)) for k in range(len(bands))}
    for k, (y0, y1) in enumerate(bands):
        fixed, free = _crowd_band(b, 10.0, 50.0, y0, y1, fill=0.95, gap=(0.3, 0.5))
        for (x, y, w, h) in fixed:
            b.static(PERSON, w, h, x, y)
        rng.shuffle(free)
        ym = 0.5 * (y0 + y1)
        for (x, y, w, h) in free[: int(0.8 * len(free))]:
            entry = 1.0 if x < 30 else SIZE_M - 1.0
            b.path(PERSON, w, h, t_next[k], [(entry, ym), (x, ym), (x, y)], float(rng.uniform(1.8, 2.6)))
            t_next[k] += float(rng.uniform(0.3, 0.9))
    return b.scene(f"plaza+pedestrians-{seed}", "plaza+pedestrians", ground_truth)


def parking_lot(seed: int, ground_truth=False) -> Scene:
    """Asphalt lot: stall rows along aisles, grass medians, cars pulling into free stalls."""
    b = _Builder(seed, base=PAVEMENT)
    rng = b.rng
    stall_w, depth, aisle, median = 2.6, 5.0, 6.0, 6.0
    t_next = float(rng.uniform(0.5, 2.0))
    y = float(rng.uniform(1.0, 3.0))
    while y < SIZE_M:
        b.rect(0, y, SIZE_M, y + median, GRASS)
        y_top = y + median
        y += median + 2 * depth + aisle
        if y_top + 2 * depth + aisle > SIZE_M:
            continue
        # stall row / aisle / stall row between medians
        rows = [(y_top, y_top + depth), (y_top + depth + aisle, y_top + 2 * depth + aisle)]
        aisle_y = y_top + depth + aisle / 2
        for r0, r1 in rows:
            x = 3.0
            while x + stall_w <= 57.0:
                xc, yc = x + stall_w / 2, 0.5 * (r0 + r1)
                w, h = float(rng.uniform(1.8, 2.2)), float(rng.uniform(4.3, 4.9))
                u = rng.random()
                if u < 0.88:
                    b.static(VEHICLE, w, h, xc, yc)
                elif u < 0.97:
                    entry = 1.0 if xc < 30 else SIZE_M - 1.0
                    t_aisle = t_next + abs(xc - entry) / 5.0
                    wp = [[0.0, entry, aisle_y], [t_next, entry, aisle_y], [t_aisle, xc, aisle_y],
                          [t_aisle + abs(yc - aisle_y) / 2.0, xc, yc]]
                    b.obstacles.append(Obstacle(VEHICLE, (w, h), np.array(wp)))
                    t_next += float(rng.uniform(0.6, 1.6))
                x += stall_w
    return b.scene(f"parking-lot-{seed}", "parking-lot", ground_truth)


def dense_crossing(seed: int, ground_truth=False) -> Scene:
    """Four-arm intersection with jammed approaches, crowded sidewalks and a scramble crossing."""
    b = _Builder(seed)
    rng = b.rng
    a0, a1 = 24.5, 35.5  # carriageway
    w0, w1 = a0 - 2.0, a1 + 2.0  # with sidewalks
    b.rect(w0, 0, w1, SIZE_M, PAVEMENT)
    b.rect(0, w0, SIZE_M, w1, PAVEMENT)
    lane_w = (a1 - a0) / 4
    stop_near, stop_far = a0 - 0.5, a1 + 0.5
    for arm in range(4):
        for lane in range(4):
            lc = a0 + lane_w * (lane + 0.5)
            horizontal = arm in (0, 1)
            stop = stop_near if arm in (0, 2) else stop_far
            sign = -1.0 if arm in (0, 2) else 1.0

            def to_xy(s, stop=stop, sign=sign, lc=lc, horizontal=horizontal):
                p = stop + sign * s
                return (p, lc) if horizontal else (lc, p)

            slots = _lane_slots(rng, (4.2, 6.0), 2.3, (0.3, 0.6), 22.5)
            back = float(rng.uniform(16.0, 19.0))
            n_static = sum(1 for s, ln, _ in slots if s + ln / 2 <= back)
            _queue_lane(b, to_xy, horizontal, slots, n_static, 23.0, float(rng.uniform(1, 4)), 4.0, 6.0)
    # sidewalk crowds and people gathering in the scramble box
    walks = [(w0, a0, 0.0, w0), (a1, w1, 0.0, w0), (w0, a0, w1, SIZE_M), (a1, w1, w1, SIZE_M),
             (0.0, w0, w0, a0), (0.0, w0, a1, w1), (w1, SIZE_M, w0, a0), (w1, SIZE_M, a1, w1)]
    for (x0, x1, y0, y1) in walks:
        fixed, _ = _crowd_band(b, x0, x1, y0, y1, fill=0.5, size=(0.6, 1.0))
        for (x, y, w, h) in fixed:
            b.static(PERSON, w, h, x, y)
    fixed, free = _crowd_band(b, a0 + 0.5, a1 - 0.5, a0 + 0.5, a1 - 0.5, fill=0.5, size=(0.8, 1.2))
    for (x, y, w, h) in fixed:
        b.static(PERSON, w, h, x, y)
    t = float(rng.uniform(0.5, 2.0))
    corners = [(a0 - 1.0, a0 - 1.0), (a1 + 1.0, a0 - 1.0), (a0 - 1.0, a1 + 1.0), (a1 + 1.0, a1 + 1.0)]
    for (x, y, w, h) in free:
        cx, cy = corners[int(rng.integers(4))]
        b.path(PERSON, w, h, t, [(cx, cy), (x, y)], float(rng.uniform(1.2, 1.8)))
        t += float(rng.uniform(0.2, 0.6))
    return b.scene(f"dense-crossing-{seed}", "dense-crossing", ground_truth)


def open_field(seed: int, ground_truth=False) -> Scene:
    """Obstacle-free lawn with a few tree clumps and a path."""
    b = _Builder(seed)
    rng = b.rng
    for _ in range(8):
        b.disk(float(rng.uniform(3, 57)), float(rng.uniform(3, 57)), float(rng.uniform(0.6, 1.5)), VEGETATION)
    y = float(rng.uniform(20, 40))
    b.rect(0, y, SIZE_M, y + 1.5, PAVEMENT)
    return b.scene(f"open-field-{seed}", "open-field", ground_truth)


CORRIDOR_HALF_WIDTH = 3.0


def road_corridor(seed: int, ground_truth=False) -> Scene:
    """Grass bisected by a road carrying a continuous two-lane convoy."""
    b = _Builder(seed)
    rng = b.rng
    yc = 30.0 + float(rng.uniform(-2.0, 2.0))
    b.rect(0, yc - CORRIDOR_HALF_WIDTH, SIZE_M, yc + CORRIDOR_HALF_WIDTH, PAVEMENT)
    xa, xb = 1.0, SIZE_M - 1.0
    loop = xb - xa
    for lane, sign in ((0, 1.0), (1, -1.0)):
        ly = yc + (lane - 0.5) * CORRIDOR_HALF_WIDTH
        n = int(loop // 6.0)
        spacing = loop / n
        speed = float(rng.uniform(4.0, 7.0))
        off = float(rng.uniform(0, spacing))
        for i in range(n):
            x0 = xa + (off + i * spacing) % loop
            wp = _wrap_path(x0, sign * speed, xa, xb, 150.0)
            b.obstacles.append(Obstacle(VEHICLE, (spacing - 0.25, 2.9), np.c_[wp[:, 0], wp[:, 1],
                                                                            np.full(len(wp), ly)]))
    sc = b.scene(f"road-corridor-{seed}", "road-corridor", ground_truth)
    sc.meta["corridor_y"] = [yc - CORRIDOR_HALF_WIDTH, yc + CORRIDOR_HALF_WIDTH]
    return sc


def _wrap_path(x0, v, xa, xb, duration, eps=1e-3):
    """(t, x) waypoints of constant motion on a loop, wrapping with a jump of duration ``eps``."""
    loop = xb - xa
    out = [(0.0, x0)]
    t, x = 0.0, x0
    while t < duration:
        dist = (xb - x) if v > 0 else (x - xa)
        t_hit = t + dist / abs(v)
        end, start = (xb, xa) if v > 0 else (xa, xb)
        out.append((t_hit, end))
        out.append((t_hit + eps, start))
        t, x = t_hit + eps, start
        if dist <= 0 and loop <= 0:
            break
    return np.array(out)


TEMPLATES = {
    "park+road": park_road,
    "plaza+pedestrians": plaza_pedestrians,
    "parking-lot": parking_lot,
    "dense-crossing": dense_crossing,
    "open-field": open_field,
    "road-corridor": road_corridor,
}

BUNDLED = ("park+road", "plaza+pedestrians", "parking-lot", "dense-crossing")


def generate(template: str, seed: int = 0, ground_truth: bool = False) -> Scene:
    try:
        fn = TEMPLATES[template]
    except KeyError:
        raise ConfigError(f"unknown template {template!r}; valid templates: {', '.join(TEMPLATES)}") from None
    return fn(int(seed), ground_truth)
