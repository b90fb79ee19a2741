"""Altitude-dependent risk expansion of the local risk view."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ConfigError


@dataclass(frozen=True)
class ExpansionConfig:
    altitude_threshold: float = 30.0
    large_kernel_sigma: float = 15.0
    moderate_kernel_sigma: float = 5.0
    kd_gain: float = 0.5
    kd_min: int = 3
    kd_max: int = 21

    def __post_init__(self):
        if self.altitude_threshold <= 0:
            raise ConfigError("altitude_threshold must be > 0")
        if self.large_kernel_sigma <= 0 or self.moderate_kernel_sigma <= 0:
            raise ConfigError("kernel sigmas must be > 0")
        if self.kd_gain < 0:
            raise ConfigError("kd_gain must be >= 0")
        if self.kd_min < 1 or self.kd_min % 2 == 0 or self.kd_max % 2 == 0:
            raise ConfigError("kd_min and kd_max must be odd and kd_min >= 1")
        if self.kd_min > self.kd_max:
            raise ConfigError("kd_min must be <= kd_max")


@lru_cache(maxsize=32)
def _kernel(sigma: float) -> np.ndarray:
    r = int(math.ceil(3.0 * sigma))
    x = np.arange(-r, r + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    k /= k.sum()
    k.setflags(write=False)
    return k


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalised 1-D Gaussian truncated at ``ceil(3 sigma)`` (odd length)."""
    if sigma <= 0:
        raise ConfigError("sigma must be > 0")
    return _kernel(float(sigma)).copy()


def gaussian_filter(risk: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with edge replication; float64 result."""
    if sigma <= 0:
        raise ConfigError("sigma must be > 0")
    img = np.ascontiguousarray(risk, dtype=np.float64)
    return kernels.convolve_separable(img, _kernel(float(sigma)))


def dilate(risk: np.ndarray, k_d: int) -> np.ndarray:
    """Grey-scale dilation: max over a ``k_d x k_d`` square window."""
    if int(k_d) != k_d or k_d < 1 or k_d % 2 == 0:
        raise ConfigError(f"dilation kernel size must be an odd integer >= 1, got {k_d}")
    return kernels.max_filter(np.ascontiguousarray(risk), int(k_d))


def round_to_odd(v: float) -> int:
    return 2 * int(math.floor((v - 1.0) / 2.0 + 0.5)) + 1


def kd_for_altitude(z: float, cfg: ExpansionConfig = ExpansionConfig()) -> int:
    k = round_to_odd(cfg.kd_gain * max(z, 0.0))
    return int(min(max(k, cfg.kd_min), cfg.kd_max))


def uses_large_kernel(z: float, cfg: ExpansionConfig) -> bool:
    return z > cfg.altitude_threshold


def expand(risk: np.ndarray, z: float, cfg: ExpansionConfig = ExpansionConfig()) -> np.ndarray:
    """Filtered risk map: large blur above the threshold, dilate + blur below."""
    if risk.size == 0:
        raise ConfigError("cannot expand an empty risk map")
    if uses_large_kernel(z, cfg):
        return gaussian_filter(risk, cfg.large_kernel_sigma)
    return gaussian_filter(dilate(risk, kd_for_altitude(z, cfg)), cfg.moderate_kernel_sigma)
