"""One seeded landing trial: the perception/selection/control loop, or a blind descent."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from ..config import TrialConfig
from ..control import (ControlCommand, ErrorRateEstimator, horizontal_command,
                       update_desired_altitude, vertical_command)
from ..evaluation import (IoUAccumulator, LandingMetrics, MetricCamera, TrialResult,
                          evaluate_landing, high_risk_mask, iou_metric)
from ..expansion import expand
from ..geometry import VehiclePose
from ..risk import GlobalRiskMap, accumulate_global, local_view, risk_from_labels
from ..selection import select_landing_point, update_consistency, weighted_map
from .plant import EAVState, step_plant
from .scene import Scene, render_labels, render_raster
from .segment import segment


@dataclass
class TrialLog:
    records: list = field(default_factory=list)
    landed: bool = False
    t_init: float = 0.0
    t_end: float = 0.0
    start: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phase: float = 0.0


@dataclass
class FrameData:
    """Everything computed in one controlled frame (handed to the optional hook)."""

    k: int
    t: float
    pose: VehiclePose
    labels: np.ndarray
    risk: np.ndarray
    local: np.ndarray
    filtered: np.ndarray
    cost: np.ndarray
    p_star: tuple[int, int]
    p_avg: np.ndarray
    center: np.ndarray
    tau: float
    z_d: float


class _Counter:
    def __init__(self):
        self.selection = 0
        self.control = 0


def _streams(seed: int):
    ss = np.random.SeedSequence(int(seed))
    start, seg, cm, phase = ss.spawn(4)
    return (np.random.default_rng(start), np.random.default_rng(seg),
            np.random.default_rng(cm), np.random.default_rng(phase))


def _round(v, d=6):
    return round(float(v), d)


def run_trial(scene: Scene, cfg: TrialConfig, hook=None) -> TrialResult:
    """Run one trial of ``cfg.mode`` on ``scene``; deterministic in ``cfg.seed``.

    Controlled modes run the full pipeline each frame. Uncontrolled modes fall
    straight down at ``max_vz`` from the random start and only perceive below
    the IoU altitude, never touching selection or control.
    """
    run = cfg.run
    cam = cfg.camera
    gains = cfg.control
    evc = cfg.evaluation
    table = cfg.risk_table(scene.class_names)
    classes = table.class_ids()
    rng_start, rng_seg, rng_cm, rng_phase = _streams(cfg.seed)

    xmin, ymin, xmax, ymax = scene.sample_region
    x0, y0 = rng_start.uniform(xmin, xmax), rng_start.uniform(ymin, ymax)
    phase = float(rng_phase.uniform(0.0, run.obstacle_phase_max)) if cfg.dynamic else 0.0

    def scene_time(t):
        return phase + t if cfg.dynamic else 0.0

    state = EAVState((float(x0), float(y0), float(run.start_altitude)))
    log = TrialLog(start=state.position, phase=phase)
    gm = GlobalRiskMap(scene.shape, scene.resolution, scene.origin, run.uninitialized_risk)
    weights = cfg.selection.weights(cam)
    tracker = cfg.selection.tracker()
    rates = ErrorRateEstimator(gains.rate_filter)
    mcam = MetricCamera(cam, evc.metric_altitude)
    c = cam.center
    dt = 1.0 / run.frame_rate
    sub_dt = dt / run.plant_substeps
    calls = _Counter()
    iou_cm, iou_gt = IoUAccumulator(), IoUAccumulator()
    z_d = float(run.start_altitude)
    violations = 0
    wall = 0.0
    k = 0

    def perceive(pose, ts):
        labels = render_labels(scene, pose, cam, ts)
        seg = segment(labels, cfg.segmenter, rng_seg, classes)
        return labels, risk_from_labels(seg, table)

    def metric_risk(x, y, ts):
        pose = mcam.pose(x, y)
        seg = segment(render_labels(scene, pose, cam, ts), cfg.segmenter, rng_cm, classes)
        return pose, risk_from_labels(seg, table)

    def gt_risk(pose, ts):
        gt = scene.ground_truth
        if isinstance(gt, str):
            labels = render_labels(scene, pose, cam, ts)
        else:
            labels = render_raster(scene.ground_truth_labels(ts), scene, pose, cam)
        return risk_from_labels(labels, table)

    def track_iou(pose, risk, ts):
        tr = gm.transform_for(pose, cam)
        cm_pose, cm_risk = metric_risk(pose.x, pose.y, ts)
        cm_tr = gm.transform_for(cm_pose, cam)
        pred = high_risk_mask(risk, evc.gamma_r)
        iou_cm.add(iou_metric(pred, high_risk_mask(cm_risk, evc.gamma_r), (tr, cm_tr)))
        if scene.has_ground_truth:
            ref = high_risk_mask(gt_risk(cm_pose, ts), evc.gamma_r)
            iou_gt.add(iou_metric(pred, ref, (tr, cm_tr)))

    while True:
        t0 = _time.perf_counter()
        t = state.time
        ts = scene_time(t)
        pose = VehiclePose(state.position)
        rec = {"k": k, "t": _round(t), "x": _round(pose.x), "y": _round(pose.y), "z": _round(pose.z)}
        below = pose.z < evc.iou_below_altitude

        if cfg.controlled:
            labels, risk = perceive(pose, ts)
            tr = gm.transform_for(pose, cam)
            before = gm.grid.copy() if run.check_invariants else None
            accumulate_global(gm, risk, tr)
            if before is not None and np.any(gm.grid < before):
                violations += 1
            local = local_view(gm, pose, cam)
            filtered = expand(local, pose.z, cfg.expansion)
            cost = weighted_map(filtered, c, weights)
            p_star = select_landing_point(cost, c)
            p_avg = tracker.push(p_star, tr if cfg.selection.reproject_queue else None)
            cons = update_consistency(tracker, p_avg, c, pose.z, cam)
            calls.selection += 1
            z_d = update_desired_altitude(z_d, cons.is_consistent, gains)
            dx, dy = float(p_avg[0] - c[0]), float(p_avg[1] - c[1])
            rx, ry = rates.update(dx, dy, dt)
            phi, theta = horizontal_command(dx, dy, rx, ry, gains)
            z_c = vertical_command(z_d, pose.z, state.velocity[2], gains)
            calls.control += 1
            rec.update({"p_star": [int(p_star[0]), int(p_star[1])],
                        "p_avg": [_round(p_avg[0]), _round(p_avg[1])],
                        "counter": cons.counter, "in_safety": bool(cons.in_safety_area),
                        "consistent": bool(cons.is_consistent), "tau": _round(cons.tau),
                        "z_d": _round(z_d)})
            if hook is not None:
                hook(FrameData(k, t, pose, labels, risk, local, filtered, cost, p_star,
                               p_avg.copy(), c, cons.tau, z_d))
        else:
            if below:
                labels, risk = perceive(pose, ts)
            phi, theta, z_c = 0.0, 0.0, -gains.max_vz

        if below:
            track_iou(pose, risk, ts)

        cmd = ControlCommand(phi, theta, z_c)
        rec["cmd"] = [_round(phi), _round(theta), _round(z_c)]
        if run.record_log:
            log.records.append(rec)
        for _ in range(run.plant_substeps):
            state = step_plant(state, cmd, sub_dt, cfg.plant)
            if state.position[2] <= run.touchdown_altitude:
                log.landed = True
                break
        wall += _time.perf_counter() - t0
        k += 1
        if log.landed or state.time >= run.timeout - 1e-9:
            break

    log.t_end = state.time
    x, y, _ = state.position
    ts = scene_time(state.time)
    _, cm_risk = metric_risk(x, y, ts)
    ppm = mcam.pixels_per_meter
    metrics = iou_cm.finish(evaluate_landing(cm_risk, c, ppm, evc, log.landed))
    gt_metrics: LandingMetrics | None = None
    if scene.has_ground_truth:
        gt = gt_risk(mcam.pose(x, y), ts)
        gt_metrics = iou_gt.finish(evaluate_landing(gt, c, ppm, evc, log.landed))
    return TrialResult(
        scene=scene.name, mode=cfg.mode, seed=cfg.seed, landed=log.landed,
        landing_x=float(x), landing_y=float(y),
        t_total=float(log.t_end - log.t_init) if log.landed else None,
        metrics=metrics, ground_truth=gt_metrics, frames=k,
        selection_calls=calls.selection, control_calls=calls.control,
        memory_violations=violations, wall_ms_per_frame=1000.0 * wall / max(k, 1), log=log)


def gating_violations(records, required_steps: int) -> int:
    """Count log steps that break the descent-gating or counter-reset rules."""
    bad = 0
    prev_zd = None
    for i, r in enumerate(records):
        if "z_d" not in r:
            continue
        if not r["in_safety"] and r["counter"] != 0:
            bad += 1
        if prev_zd is not None and r["z_d"] < prev_zd:
            window = records[max(0, i - required_steps + 1):i + 1]
            if len(window) < required_steps or not all(w["in_safety"] for w in window):
                bad += 1
        prev_zd = r["z_d"]
    return bad
