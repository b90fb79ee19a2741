"""Landing metrics against a fixed-altitude metric camera, plus aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigError, EvaluationError, UnsupportedSceneError
from .geometry import CameraModel, GroundTransform, VehiclePose, compose_affine

MODES = ("SU", "SC", "DU", "DC")


@dataclass(frozen=True)
class EvalConfig:
    metric_altitude: float = 30.0
    gamma_r: int = 3
    success_radius_m: float = 0.5
    risk_diameter_m: float = 2.0
    warning_radii_m: tuple[float, float] = (1.0, 2.0)
    iou_below_altitude: float = 30.0

    def __post_init__(self):
        if self.metric_altitude <= 0 or self.success_radius_m <= 0 or self.risk_diameter_m <= 0:
            raise ConfigError("evaluation altitudes and radii must be > 0")
        if not 0 < self.warning_radii_m[0] < self.warning_radii_m[1]:
            raise ConfigError("warning radii must satisfy 0 < w1 < w2")


@dataclass(frozen=True)
class MetricCamera:
    """Virtual evaluation camera at constant altitude, locked to the EAV x-y."""

    cam: CameraModel
    altitude: float = 30.0

    def pose(self, x: float, y: float, yaw: float = 0.0) -> VehiclePose:
        return VehiclePose((x, y, self.altitude), yaw)

    @property
    def pixels_per_meter(self) -> float:
        return self.cam.focal_length_px / self.altitude


def high_risk_mask(risk: np.ndarray, gamma_r: float = 3) -> np.ndarray:
    return np.asarray(risk) > gamma_r


def disk_mask(shape, center, radius_px: float) -> np.ndarray:
    """Pixels whose centres lie within ``radius_px`` of ``center``."""
    ys, xs = np.ogrid[0:shape[0], 0:shape[1]]
    return (xs - center[0]) ** 2 + (ys - center[1]) ** 2 <= radius_px ** 2


def _check_inside(shape, p):
    if not (-0.5 <= p[0] < shape[1] - 0.5 and -0.5 <= p[1] < shape[0] - 0.5):
        raise EvaluationError(f"landing point {tuple(p)} lies outside the metric camera view")


def success_metric(cm_risk, landing_px, pixels_per_meter: float, radius_m: float = 0.5,
                   gamma_r: float = 3) -> int:
    """1 when no high-risk pixel lies inside the landing circle, else 0."""
    _check_inside(cm_risk.shape, landing_px)
    disk = disk_mask(cm_risk.shape, landing_px, radius_m * pixels_per_meter)
    return 0 if np.any(high_risk_mask(cm_risk, gamma_r) & disk) else 1


def risk_metric(cm_risk, landing_px, pixels_per_meter: float, diameter_m: float = 2.0,
                gamma_r: float = 3) -> float:
    """Fraction of high-risk pixels inside the circle of the given diameter."""
    _check_inside(cm_risk.shape, landing_px)
    disk = disk_mask(cm_risk.shape, landing_px, 0.5 * diameter_m * pixels_per_meter)
    n = int(disk.sum())
    if n == 0:
        raise EvaluationError("risk disk contains no pixels")
    return float(np.count_nonzero(high_risk_mask(cm_risk, gamma_r) & disk)) / n


class Proximity(NamedTuple):
    meters: float
    sentinel: bool  # True when no hazard is visible; meters is then the half view diagonal


def proximity_metric(cm_risk, landing_px, pixels_per_meter: float, gamma_r: float = 3) -> Proximity:
    _check_inside(cm_risk.shape, landing_px)
    rows, cols = np.nonzero(high_risk_mask(cm_risk, gamma_r))
    if rows.size == 0:
        h, w = cm_risk.shape
        return Proximity(0.5 * math.hypot(w, h) / pixels_per_meter, True)
    d = np.sqrt((cols - landing_px[0]) ** 2 + (rows - landing_px[1]) ** 2).min()
    return Proximity(float(d) / pixels_per_meter, False)


def warning_metrics(proximity_m: float, radii=(1.0, 2.0)) -> tuple[int, int]:
    if proximity_m < 0:
        raise EvaluationError("proximity must be >= 0")
    w1 = int(proximity_m < radii[0])
    w2 = int(radii[0] <= proximity_m < radii[1])
    return w1, w2


def iou_metric(pred_mask, ref_mask, registration: tuple[GroundTransform, GroundTransform]):
    """IoU of high-risk masks compared on the reference (metric camera) grid.

    ``registration`` is ``(pred_transform, ref_transform)``, both mapping
    their image pixels into the same global grid. Reference pixels outside
    the predicted view are ignored. Returns ``None`` for an empty union.
    """
    t_pred, t_ref = registration
    ref_mask = np.asarray(ref_mask, dtype=bool)
    M = compose_affine(t_pred.inverse_affine(), t_ref.affine())
    src = np.ascontiguousarray(pred_mask, dtype=np.uint8)
    warped, _ = kernels.sample_nearest(src, src.view(bool), False, M,
                                       ref_mask.shape[0], ref_mask.shape[1], np.uint8(255))
    seen = warped != 255
    p = warped == 1
    g = ref_mask & seen
    union = np.count_nonzero(p | g)
    if union == 0:
        return None
    return np.count_nonzero(p & g) / union


def execution_time(log) -> float | None:
    """Simulated seconds from task start to touchdown; ``None`` on timeout."""
    if not log.landed:
        return None
    return float(log.t_end - log.t_init)


@dataclass
class LandingMetrics:
    success: int
    risk_ratio: float
    proximity: float
    proximity_sentinel: bool
    w1: int
    w2: int
    iou_mean: float | None = None
    iou_frames: int = 0
    iou_skipped: int = 0


def evaluate_landing(cm_risk, landing_px, pixels_per_meter: float, cfg: EvalConfig,
                     landed: bool = True) -> LandingMetrics:
    succ = success_metric(cm_risk, landing_px, pixels_per_meter, cfg.success_radius_m, cfg.gamma_r)
    risk = risk_metric(cm_risk, landing_px, pixels_per_meter, cfg.risk_diameter_m, cfg.gamma_r)
    prox = proximity_metric(cm_risk, landing_px, pixels_per_meter, cfg.gamma_r)
    w1, w2 = warning_metrics(prox.meters, cfg.warning_radii_m)
    return LandingMetrics(succ if landed else 0, risk, prox.meters, prox.sentinel, w1, w2)


class IoUAccumulator:
    def __init__(self):
        self.values: list[float] = []
        self.skipped = 0

    def add(self, value):
        if value is None:
            self.skipped += 1
        else:
            self.values.append(float(value))

    def finish(self, metrics: LandingMetrics) -> LandingMetrics:
        metrics.iou_mean = float(np.mean(self.values)) if self.values else None
        metrics.iou_frames = len(self.values)
        metrics.iou_skipped = self.skipped
        return metrics


@dataclass
class TrialResult:
    scene: str
    mode: str
    seed: int
    landed: bool
    landing_x: float
    landing_y: float
    t_total: float | None
    metrics: LandingMetrics
    ground_truth: LandingMetrics | None = None
    frames: int = 0
    selection_calls: int = 0
    control_calls: int = 0
    memory_violations: int = 0
    wall_ms_per_frame: float = 0.0
    log: object = field(default=None, repr=False, compare=False)

    @property
    def success(self) -> int:
        return self.metrics.success


# CSV layouts. Float formatting is fixed so reruns are byte-identical.
TRIAL_COLUMNS = ["scene", "mode", "seed", "landed", "landing_x", "landing_y", "succ", "risk",
                 "prox", "prox_sentinel", "w1", "w2", "iou", "iou_frames", "time", "frames"]
SUMMARY_COLUMNS = ["scene", "mode", "succ_pct", "risk_pct", "prox_m", "w1_pct", "w2_pct", "iou",
                   "time_s", "n", "landed", "prox_sentinels", "iou_missing", "time_missing"]
GT_COLUMNS = ["metric", "camera_cm", "ground_truth"]


def _fmt(v, digits=4):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.{digits}f}"


def trial_row(r: TrialResult, metrics: LandingMetrics | None = None) -> dict[str, str]:
    m = metrics or r.metrics
    return {
        "scene": r.scene, "mode": r.mode, "seed": str(r.seed), "landed": _fmt(r.landed),
        "landing_x": _fmt(r.landing_x), "landing_y": _fmt(r.landing_y),
        "succ": _fmt(m.success), "risk": _fmt(m.risk_ratio, 6), "prox": _fmt(m.proximity),
        "prox_sentinel": _fmt(m.proximity_sentinel), "w1": _fmt(m.w1), "w2": _fmt(m.w2),
        "iou": _fmt(m.iou_mean), "iou_frames": str(m.iou_frames), "time": _fmt(r.t_total),
        "frames": str(r.frames),
    }


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return float(np.mean(xs)) if xs else None


def _summary(results, pick):
    ms = [pick(r) for r in results]
    return {
        "succ_pct": 100.0 * float(np.mean([m.success for m in ms])),
        "risk_pct": 100.0 * float(np.mean([m.risk_ratio for m in ms])),
        "prox_m": float(np.mean([m.proximity for m in ms])),
        "w1_pct": 100.0 * float(np.mean([m.w1 for m in ms])),
        "w2_pct": 100.0 * float(np.mean([m.w2 for m in ms])),
        "iou": _mean([m.iou_mean for m in ms]),
        "time_s": _mean([r.t_total for r in results]),
        "n": len(results),
        "landed": sum(bool(r.landed) for r in results),
        "prox_sentinels": sum(bool(m.proximity_sentinel) for m in ms),
        "iou_missing": sum(m.iou_mean is None for m in ms),
        "time_missing": sum(r.t_total is None for r in results),
    }


def aggregate(results: list[TrialResult]) -> list[dict]:
    """One summary row per (scene, mode), in the fixed mode order.

    Timeouts count as failures; proximity includes sentinel values (counted
    in ``prox_sentinels``); IoU and time average over trials that have them.
    """
    if not results:
        raise EvaluationError("aggregate needs at least one result")
    groups: dict[tuple[str, str], list[TrialResult]] = {}
    for r in results:
        groups.setdefault((r.scene, r.mode), []).append(r)
    order = {m: i for i, m in enumerate(MODES)}
    rows = []
    for (scene, mode) in sorted(groups, key=lambda k: (k[0], order.get(k[1], 99), k[1])):
        row = {"scene": scene, "mode": mode}
        row.update(_summary(groups[(scene, mode)], lambda r: r.metrics))
        rows.append(row)
    return rows


def format_row(row: dict, columns) -> dict[str, str]:
    out = {}
    for c in columns:
        v = row.get(c)
        out[c] = v if isinstance(v, str) else _fmt(v)
    return out


_GT_METRICS = [("Success Rate [%]", "succ_pct"), ("Risk [%]", "risk_pct"),
               ("Proximity [m]", "prox_m"), ("Warning 1 [%]", "w1_pct"),
               ("Warning 2 [%]", "w2_pct"), ("IoU", "iou"), ("Execution Time [s]", "time_s")]


def evaluate_against_ground_truth(results: list[TrialResult], scene) -> list[dict]:
    """Side-by-side summary: metric camera vs ground-truth labels."""
    if scene is None or not getattr(scene, "has_ground_truth", False):
        raise UnsupportedSceneError("scene provides no ground-truth labels")
    if not results:
        raise EvaluationError("no results to compare")
    if any(r.ground_truth is None for r in results):
        raise EvaluationError("results were produced without ground-truth evaluation")
    cm = _summary(results, lambda r: r.metrics)
    gt = _summary(results, lambda r: r.ground_truth)
    return [{"metric": name, "camera_cm": cm[key], "ground_truth": gt[key]} for name, key in _GT_METRICS]
