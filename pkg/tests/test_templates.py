import numpy as np
import pytest

from riskland.config import TrialConfig
from riskland.errors import ConfigError
from riskland.sim.templates import BUNDLED, TEMPLATES, generate


def _table(scene):
    return TrialConfig().risk_table(scene.class_names)


@pytest.mark.parametrize("name", sorted(TEMPLATES))
def test_deterministic(name):
    a, b = generate(name, 4), generate(name, 4)
    assert np.array_equal(a.base_labels, b.base_labels)
    assert len(a.obstacles) == len(b.obstacles)
    for oa, ob in zip(a.obstacles, b.obstacles):
        assert oa.class_id == ob.class_id and np.array_equal(oa.waypoints, ob.waypoints)
    if name != "open-field":
        c = generate(name, 5)
        assert not (np.array_equal(a.base_labels, c.base_labels)
                    and all(np.array_equal(x.waypoints, y.waypoints) for x, y in zip(a.obstacles, c.obstacles)))


@pytest.mark.parametrize("name", BUNDLED)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bundled_postconditions(name, seed):
    s = generate(name, seed)
    moving = [o for o in s.obstacles if np.ptp(o.waypoints[:, 1:], axis=0).max() > 0]
    assert moving, "at least one moving obstacle"
    assert {o.class_id for o in moving} & {6, 7}
    fr = s.risk_fractions(_table(s))
    assert fr["low"] >= 0.25
    assert fr["high"] >= 0.25


def test_open_field_is_hazard_free():
    s = generate("open-field", 0)
    assert not s.obstacles
    assert s.risk_fractions(_table(s))["high"] == 0.0


def test_corridor_fraction_recorded():
    s = generate("road-corridor", 0)
    y0, y1 = s.meta["corridor_y"]
    xmin, ymin, xmax, ymax = s.sample_region
    assert ymin < y0 < y1 < ymax
    assert all(y0 <= o.waypoints[:, 2].min() and o.waypoints[:, 2].max() <= y1 for o in s.obstacles)


def test_unknown_template_lists_valid():
    with pytest.raises(ConfigError) as exc:
        generate("swamp", 0)
    for name in BUNDLED:
        assert name in str(exc.value)


def test_ground_truth_flag():
    assert generate("park+road", 0).ground_truth is None
    assert generate("park+road", 0, ground_truth=True).has_ground_truth
