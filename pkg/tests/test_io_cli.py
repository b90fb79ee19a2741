import json

import numpy as np
import pytest
from PIL import Image

from riskland import cli, io
from riskland.config import TrialConfig, apply_overrides, load_config
from riskland.geometry import VehiclePose, meters_to_pixels
from riskland.risk import risk_from_labels, risk_to_image
from riskland.sim.scene import render_labels
from riskland.sim.templates import generate
from riskland.sim.trial import run_trial

FAST = ["--set", "run.start_altitude=15"]


def _err(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


@pytest.fixture(scope="module")
def scene_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("scene") / "park.json"
    assert cli.main(["generate", "--template", "park+road", "--seed", "1", "--out", str(out)]) == 0
    return out


def test_manifest_round_trip(tmp_path):
    s = generate("dense-crossing", 3, ground_truth=True)
    path = io.save_scene(s, tmp_path / "dc.json")
    t = io.load_scene(path)
    assert np.array_equal(s.base_labels, t.base_labels)
    assert (s.resolution, s.origin, s.duration, s.name, s.template) == (t.resolution, t.origin, t.duration,
                                                                         t.name, t.template)
    assert s.class_names == t.class_names and s.ground_truth == t.ground_truth
    np.testing.assert_allclose(s.sample_region, t.sample_region)
    assert len(s.obstacles) == len(t.obstacles)
    for a, b in zip(s.obstacles, t.obstacles):
        assert a.class_id == b.class_id and np.allclose(a.size, b.size)
        np.testing.assert_array_equal(a.waypoints, b.waypoints)
    doc = json.loads(path.read_text())
    assert doc["format"] == io.SCENE_FORMAT


def test_corridor_meta_round_trip(tmp_path):
    s = generate("road-corridor", 0)
    assert io.load_scene(io.save_scene(s, tmp_path / "rc.json")).meta == s.meta


def test_generate_identical_bytes(tmp_path):
    for d in ("a", "b"):
        assert cli.main(["generate", "--template", "park+road", "--seed", "1", "--out", str(tmp_path / d)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names and names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_generate_unknown_template(capsys, tmp_path):
    assert cli.main(["generate", "--template", "swamp", "--out", str(tmp_path)]) == 2
    line = _err(capsys)
    assert line.startswith("riskland: error: config:")
    for name in ("park+road", "plaza+pedestrians", "parking-lot", "dense-crossing"):
        assert name in line


def test_generate_unwritable(capsys):
    assert cli.main(["generate", "--template", "park+road", "--out", "/proc/nope/x.json"]) == 2
    assert _err(capsys).startswith("riskland: error:")


def test_output_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    assert cli.main(["generate", "--template", "open-field", "--seed", "2"]) == 0
    assert (tmp_path / "env" / "scenes" / "open-field-2.json").exists()


def test_run_counts_and_determinism(scene_path, tmp_path):
    args = ["run", "--scene", str(scene_path), "--trials", "2", "--modes", "SU,SC,DU,DC", *FAST]
    assert cli.main(args + ["--out", str(tmp_path / "a"), "--check-invariants"]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b"), "--parallel", "2"]) == 0
    trials = io.read_csv(tmp_path / "a" / "trials.csv")
    assert len(trials) == 8 and len(io.read_csv(tmp_path / "a" / "summary.csv")) == 4
    assert [r["mode"] for r in trials] == ["SU", "SU", "SC", "SC", "DU", "DU", "DC", "DC"]
    for name in ("trials.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert len(list((tmp_path / "a" / "logs").glob("*.jsonl"))) == 8
    header, records = io.read_log(tmp_path / "a" / "logs" / "DC-00000.jsonl")
    assert header["memory_violations"] == 0 and records[0]["k"] == 0
    assert load_config(tmp_path / "a" / "config.ini").run.start_altitude == 15.0


def test_run_manifest(scene_path, tmp_path):
    m = tmp_path / "run.json"
    m.write_text(json.dumps({"format": cli.RUN_FORMAT, "scene": str(scene_path), "modes": ["DU"], "trials": 3,
                             "seed": 10, "overrides": {"run.start_altitude": 15}, "out": "res"}))
    assert cli.main(["run", "--manifest", str(m), "--no-logs"]) == 0
    rows = io.read_csv(tmp_path / "res" / "trials.csv")
    assert [r["seed"] for r in rows] == ["10", "11", "12"]
    assert not (tmp_path / "res" / "logs").exists()


def test_evaluate_reproduces_summary(scene_path, tmp_path):
    assert cli.main(["run", "--scene", str(scene_path), "--trials", "3", "--modes", "DU", "--no-logs",
                     "--out", str(tmp_path / "r"), *FAST]) == 0
    before = (tmp_path / "r" / "summary.csv").read_bytes()
    assert cli.main(["evaluate", "--trials", str(tmp_path / "r" / "trials.csv"), "--out", str(tmp_path / "e")]) == 0
    assert (tmp_path / "e" / "summary.csv").read_bytes() == before


@pytest.mark.parametrize("argv, category", [
    (["run", "--scene", "/nonexistent.json", "--trials", "1"], "scene-load"),
    (["run", "--trials", "1"], "config"),
    (["run", "--scene", "{scene}", "--trials", "0"], "config"),
    (["run", "--scene", "{scene}", "--modes", "XX", "--trials", "1"], "config"),
    (["run", "--scene", "{scene}", "--set", "run.frame_rate=-1", "--trials", "1"], "config"),
    (["dump", "--scene", "{scene}", "--frames", "100000", "--out", "{tmp}"], "frame-range"),
    (["dump", "--scene", "{scene}", "--frames", "a,b", "--out", "{tmp}"], "config"),
    (["dump", "--scene", "{scene}", "--mode", "SU", "--out", "{tmp}"], "config"),
    (["evaluate", "--trials", "/nonexistent.csv"], "config"),
    (["frobnicate"], "config"),
])
def test_cli_errors(argv, category, scene_path, tmp_path, capsys):
    argv = [a.format(scene=scene_path, tmp=tmp_path) for a in argv]
    assert cli.main(argv) == 2
    assert _err(capsys).startswith(f"riskland: error: {category}:")


def test_frame_range_message_names_frame(scene_path, tmp_path, capsys):
    assert cli.main(["dump", "--scene", str(scene_path), "--frames", "0,99999", "--out", str(tmp_path)]) == 2
    assert "99999" in _err(capsys)


def test_dump_frame_zero(scene_path, tmp_path):
    out = tmp_path / "dump"
    assert cli.main(["dump", "--scene", str(scene_path), "--seed", "3", "--mode", "SC", "--frames", "0,4",
                     "--out", str(out)]) == 0
    for k in (0, 4):
        for name in ("risk", "local", "dilated", "filtered", "cost", "overlay"):
            assert (out / f"frame-{k:04d}-{name}.png").exists()
    scene = io.load_scene(scene_path)
    cfg = TrialConfig().with_mode("SC", 3)
    poses = []
    run_trial(scene, apply_overrides(cfg, {"run.timeout": "0.25"}), hook=lambda fd: poses.append(fd.pose))
    table = cfg.risk_table(scene.class_names)
    expected = risk_to_image(risk_from_labels(render_labels(scene, poses[0], cfg.camera, 0.0), table))
    np.testing.assert_array_equal(io.read_png(out / "frame-0000-risk.png"), expected)

    side = json.loads((out / "frame-0004.json").read_text())
    tau = meters_to_pixels(cfg.selection.safety_radius_m, VehiclePose((0, 0, side["z"])), cfg.camera)
    assert side["tau_px"] == pytest.approx(tau)
    img = np.array(Image.open(out / "frame-0004-overlay.png"))
    red = np.all(img == (255, 0, 0), axis=-1)
    assert red.sum() == 1
    ys, xs = np.nonzero(red)
    assert (xs[0], ys[0]) == tuple(side["p_star"])
    yellow = np.all(img == (255, 255, 0), axis=-1)
    ys, xs = np.nonzero(yellow)
    r = np.hypot(xs - side["center"][0], ys - side["center"][1])
    assert yellow.sum() > 8 and np.all(np.abs(r - tau) <= 0.75)


def test_config_command(tmp_path, capsys):
    assert cli.main(["config"]) == 0
    text = capsys.readouterr().out
    assert "[selection]" in text and load_config(text) == TrialConfig()
    assert cli.main(["config", "--out", str(tmp_path / "ref.ini")]) == 0
    assert load_config(tmp_path / "ref.ini") == TrialConfig()
