"""Point-mass stand-in for the emulated aerial vehicle."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..control import ControlCommand
from ..errors import ConfigError


@dataclass(frozen=True)
class PlantConfig:
    gravity: float = 9.81
    drag: float = 0.5               # 1/s, linear horizontal drag
    vz_time_constant: float = 0.3   # s, first-order lag on vertical rate

    def __post_init__(self):
        if self.gravity <= 0 or self.drag < 0 or self.vz_time_constant <= 0:
            raise ConfigError("invalid plant parameters")


@dataclass(frozen=True)
class EAVState:
    position: tuple[float, float, float]
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    time: float = 0.0


def step_plant(state: EAVState, cmd: ControlCommand, dt: float,
               cfg: PlantConfig = PlantConfig(), yaw: float = 0.0) -> EAVState:
    """Semi-implicit Euler step: tilt -> horizontal acceleration, lagged climb rate."""
    if dt <= 0:
        raise ConfigError("dt must be > 0")
    x, y, z = state.position
    vx, vy, vz = state.velocity
    ax_b = cfg.gravity * math.tan(cmd.phi_c)
    ay_b = cfg.gravity * math.tan(cmd.theta_c)
    c, s = math.cos(yaw), math.sin(yaw)
    ax = c * ax_b - s * ay_b - cfg.drag * vx
    ay = s * ax_b + c * ay_b - cfg.drag * vy
    vx += ax * dt
    vy += ay * dt
    vz += (cmd.z_c - vz) * (1.0 - math.exp(-dt / cfg.vz_time_constant))
    x += vx * dt
    y += vy * dt
    z += vz * dt
    if z <= 0.0:
        z = 0.0
        vz = max(vz, 0.0)
    return EAVState((x, y, z), (vx, vy, vz), state.time + dt)

