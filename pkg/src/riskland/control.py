"""Image-based PD guidance and gated altitude control."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class ControlGains:
    kp_x: float = 0.0032   # rad / px
    kd_x: float = 0.0016   # rad s / px
    kp_y: float = 0.0032
    kd_y: float = 0.0016
    kp_z: float = 0.8      # 1 / s
    kd_z: float = 0.3
    delta_z: float = 0.5   # m per consistent frame
    max_tilt: float = 0.3  # rad
    max_vz: float = 2.0    # m / s
    rate_filter: float = 0.5

    def __post_init__(self):
        gains = (self.kp_x, self.kd_x, self.kp_y, self.kd_y, self.kp_z, self.kd_z)
        if min(gains) < 0:
            raise ConfigError("control gains must be >= 0")
        if self.delta_z <= 0 or self.max_tilt <= 0 or self.max_vz <= 0:
            raise ConfigError("delta_z, max_tilt and max_vz must be > 0")
        if not 0 <= self.rate_filter < 1:
            raise ConfigError("rate_filter must lie in [0, 1)")


@dataclass(frozen=True)
class ControlCommand:
    phi_c: float = 0.0    # roll, moves along image +x
    theta_c: float = 0.0  # pitch, moves along image +y
    z_c: float = 0.0      # vertical rate, m/s, positive up


def _sat(v, lim):
    return max(-lim, min(lim, v))


def horizontal_command(dx, dy, dx_rate, dy_rate, g: ControlGains) -> tuple[float, float]:
    phi = _sat(g.kp_x * dx + g.kd_x * dx_rate, g.max_tilt)
    theta = _sat(g.kp_y * dy + g.kd_y * dy_rate, g.max_tilt)
    return phi, theta


def update_desired_altitude(z_d: float, is_consistent: bool, g: ControlGains) -> float:
    if not is_consistent:
        return z_d
    return max(z_d - g.delta_z, 0.0)


def vertical_command(z_d: float, z: float, z_rate: float, g: ControlGains) -> float:
    return _sat(g.kp_z * (z_d - z) - g.kd_z * z_rate, g.max_vz)


class ErrorRateEstimator:
    """Backward difference of a 2-D error, smoothed by a one-pole filter."""

    def __init__(self, coeff: float = 0.5):
        self.coeff = coeff
        self._prev = None
        self.rate = (0.0, 0.0)

    def update(self, dx: float, dy: float, dt: float) -> tuple[float, float]:
        if self._prev is not None and dt > 0:
            rx = (dx - self._prev[0]) / dt
            ry = (dy - self._prev[1]) / dt
            a = self.coeff
            self.rate = (a * self.rate[0] + (1 - a) * rx, a * self.rate[1] + (1 - a) * ry)
        self._prev = (dx, dy)
        return self.rate
