"""Per-frame map images from a replayed trial: brighter = riskier.

For each requested frame ``k`` the files ``frame-KKKK-<map>.png`` are written
for the maps ``risk`` (R_k), ``local``, ``dilated``, ``filtered`` and
``cost`` (V, min-max normalised), plus ``frame-KKKK-overlay.png``: the cost
map in grey with the safety circle in yellow, the image centre in blue,
the averaged point in green and the selected point as a single red pixel.
A ``frame-KKKK.json`` sidecar records the same geometry numerically.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import io
from .config import TrialConfig
from .errors import ConfigError, FrameRangeError
from .expansion import dilate, kd_for_altitude
from .risk import risk_to_image
from .sim.scene import Scene
from .sim.trial import FrameData, run_trial

RED, GREEN, BLUE, YELLOW = (255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 0)


def normalize(v: np.ndarray) -> np.ndarray:
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi <= lo:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.rint(255.0 * (v - lo) / (hi - lo)).astype(np.uint8)


def _put(img, x, y, color):
    xi, yi = int(math.floor(x + 0.5)), int(math.floor(y + 0.5))
    if 0 <= yi < img.shape[0] and 0 <= xi < img.shape[1]:
        img[yi, xi] = color


def overlay(cost: np.ndarray, p_star, p_avg, c, tau: float) -> np.ndarray:
    grey = normalize(cost)
    img = np.repeat(grey[:, :, None], 3, axis=2)
    n = max(16, int(2 * math.pi * tau * 2))
    for a in np.linspace(0.0, 2 * math.pi, n, endpoint=False):
        _put(img, c[0] + tau * math.cos(a), c[1] + tau * math.sin(a), YELLOW)
    _put(img, c[0], c[1], BLUE)
    _put(img, p_avg[0], p_avg[1], GREEN)
    _put(img, p_star[0], p_star[1], RED)
    return img


def dump_frames(scene: Scene, cfg: TrialConfig, frames, out) -> list[Path]:
    """Replay ``cfg`` on ``scene`` and write the maps of the requested frames."""
    if not cfg.controlled:
        raise ConfigError("map dumps need a controlled mode (SC or DC)")
    wanted = sorted(set(int(f) for f in frames))
    if not wanted or wanted[0] < 0:
        raise FrameRangeError("frame indices must be >= 0")
    captured: dict[int, FrameData] = {}

    def hook(fd: FrameData):
        if fd.k in wanted:
            captured[fd.k] = fd

    result = run_trial(scene, cfg, hook=hook)
    missing = [f for f in wanted if f not in captured]
    if missing:
        raise FrameRangeError(f"frame(s) {missing} out of range; the trial ran {result.frames} frames")
    out = io.ensure_dir(out)
    written = []
    for k in wanted:
        fd = captured[k]
        kd = kd_for_altitude(fd.pose.z, cfg.expansion)
        maps = {"risk": risk_to_image(fd.risk), "local": risk_to_image(fd.local),
                "dilated": risk_to_image(dilate(fd.local, kd)), "filtered": risk_to_image(fd.filtered),
                "cost": normalize(fd.cost),
                "overlay": overlay(fd.cost, fd.p_star, fd.p_avg, fd.center, fd.tau)}
        for name, img in maps.items():
            p = out / f"frame-{k:04d}-{name}.png"
            io.write_png(p, img)
            written.append(p)
        side = {"frame": k, "t": fd.t, "z": fd.pose.z, "kd": kd, "p_star": list(map(int, fd.p_star)),
                "p_avg": [float(v) for v in fd.p_avg], "center": [float(v) for v in fd.center],
                "tau_px": float(fd.tau), "z_d": fd.z_d}
        p = out / f"frame-{k:04d}.json"
        p.write_text(json.dumps(side, indent=1) + "\n", encoding="utf-8")
        written.append(p)
    return written
