"""Trial configuration and its INI file format.

Every section maps to one dataclass; every key to one field. Tuples are
written comma-separated. ``reference_config()`` renders all defaults.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import typing
from dataclasses import dataclass, field, fields, replace

from .control import ControlGains
from .errors import ConfigError
from .evaluation import MODES, EvalConfig
from .expansion import ExpansionConfig
from .geometry import CameraModel
from .risk import DEFAULT_RISK_BY_NAME, RiskTable
from .selection import LandingTracker, SelectionWeights
from .sim.plant import PlantConfig
from .sim.segment import SegmenterConfig


@dataclass(frozen=True)
class SelectionConfig:
    alpha: float = 1.0
    beta: float = -1.0  # negative: normalise against the image corner
    queue_length: int = 10
    consistency_steps: int = 15
    safety_radius_m: float = 1.0
    reproject_queue: bool = True

    def weights(self, cam: CameraModel) -> SelectionWeights:
        if self.beta < 0:
            return SelectionWeights.normalized(cam, self.alpha)
        return SelectionWeights(self.alpha, self.beta)

    def tracker(self) -> LandingTracker:
        return LandingTracker(self.queue_length, self.consistency_steps, self.safety_radius_m)


@dataclass(frozen=True)
class RunConfig:
    start_altitude: float = 40.0
    frame_rate: float = 4.0
    timeout: float = 120.0
    touchdown_altitude: float = 0.3
    plant_substeps: int = 5
    uninitialized_risk: int = 2
    obstacle_phase_max: float = 2.0
    check_invariants: bool = False
    record_log: bool = True

    def __post_init__(self):
        if self.frame_rate <= 0 or self.timeout <= 0 or self.plant_substeps < 1:
            raise ConfigError("frame_rate, timeout and plant_substeps must be positive")
        if self.start_altitude <= self.touchdown_altitude:
            raise ConfigError("start_altitude must exceed touchdown_altitude")
        if self.obstacle_phase_max < 0:
            raise ConfigError("obstacle_phase_max must be >= 0")


@dataclass(frozen=True)
class TrialConfig:
    mode: str = "DC"
    seed: int = 0
    run: RunConfig = field(default_factory=RunConfig)
    camera: CameraModel = field(default_factory=CameraModel)
    risk: dict = field(default_factory=lambda: dict(DEFAULT_RISK_BY_NAME))
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    control: ControlGains = field(default_factory=ControlGains)
    plant: PlantConfig = field(default_factory=PlantConfig)
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig)
    evaluation: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")

    @property
    def controlled(self) -> bool:
        return self.mode.endswith("C")

    @property
    def dynamic(self) -> bool:
        return self.mode.startswith("D")

    def risk_table(self, class_names) -> RiskTable:
        return RiskTable.from_names(class_names, self.risk)

    def with_mode(self, mode: str, seed: int | None = None) -> "TrialConfig":
        return replace(self, mode=mode, seed=self.seed if seed is None else seed)


_SECTIONS = ["run", "camera", "expansion", "selection", "control", "plant", "segmenter", "evaluation"]


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_format(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def _parse(text: str, hint, default):
    text = text.strip()
    origin = typing.get_origin(hint)
    if origin is tuple or isinstance(default, tuple):
        args = typing.get_args(hint)
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if args and args[-1] is Ellipsis:
            return tuple(_parse(p, args[0], None) for p in parts)
        if args:
            if len(parts) != len(args):
                raise ConfigError(f"expected {len(args)} comma-separated values, got {text!r}")
            return tuple(_parse(p, a, None) for p, a in zip(parts, args))
        return tuple(float(p) for p in parts)
    if hint is bool or isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {text!r}")
    if hint is int or (isinstance(default, int) and not isinstance(default, bool)):
        return int(text)
    if hint is float or isinstance(default, float):
        return float(text)
    return text


def _update_dataclass(obj, items: dict, section: str):
    hints = typing.get_type_hints(type(obj))
    known = {f.name: f for f in fields(obj) if f.init and not f.name.startswith("_")}
    changes = {}
    for key, text in items.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        try:
            changes[key] = _parse(str(text), hints.get(key), getattr(obj, key))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None
    try:
        return replace(obj, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from None


def apply_overrides(cfg: TrialConfig, overrides: dict) -> TrialConfig:
    """Apply ``{"section.key": value}`` or ``{"section": {key: value}}`` overrides."""
    by_section: dict[str, dict] = {}
    for k, v in overrides.items():
        if isinstance(v, dict):
            by_section.setdefault(k, {}).update(v)
            continue
        if "." not in k:
            raise ConfigError(f"override key {k!r} must look like section.key")
        sec, key = k.split(".", 1)
        by_section.setdefault(sec, {})[key] = v
    changes = {}
    for sec, items in by_section.items():
        items = {k: _format(v) if not isinstance(v, str) else v for k, v in items.items()}
        if sec == "risk":
            table = dict(cfg.risk)
            for name, val in items.items():
                table[name] = int(val)
            changes["risk"] = table
        elif sec == "trial":
            for key, val in items.items():
                if key == "mode":
                    changes["mode"] = val.strip()
                elif key == "seed":
                    changes["seed"] = int(val)
                else:
                    raise ConfigError(f"unknown key {key!r} in section [trial]")
        elif sec in _SECTIONS:
            changes[sec] = _update_dataclass(getattr(cfg, sec), items, sec)
        else:
            raise ConfigError(f"unknown config section [{sec}]")
    return replace(cfg, **changes)


def load_config(path_or_text, base: TrialConfig | None = None) -> TrialConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    text = str(path_or_text)
    try:
        if "\n" in text or text.lstrip().startswith("["):
            parser.read_string(text)
        else:
            with open(text, encoding="utf-8") as fh:
                parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    overrides = {sec: dict(parser.items(sec)) for sec in parser.sections()}
    return apply_overrides(base or TrialConfig(), overrides)


def dump_config(cfg: TrialConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["trial"] = {"mode": cfg.mode, "seed": str(cfg.seed)}
    for sec in _SECTIONS:
        obj = getattr(cfg, sec)
        parser[sec] = {f.name: _format(getattr(obj, f.name))
                       for f in dataclasses.fields(obj) if f.init and not f.name.startswith("_")}
    parser["risk"] = {k: str(v) for k, v in cfg.risk.items()}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def reference_config() -> str:
    header = ("# riskland reference configuration: every key with its default value.\n"
              "# selection.beta < 0 normalises beta against the farthest image corner.\n\n")
    return header + dump_config(TrialConfig())
