"""Risk-aware emergency landing for a camera-equipped UAV: risk maps, risk
memory, expansion, landing-point selection, descent control and a seeded
trial simulator with its evaluation metrics."""

from .config import TrialConfig, load_config, reference_config
from .errors import RisklandError
from .geometry import CameraModel, VehiclePose
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["TrialConfig", "load_config", "reference_config", "RisklandError", "CameraModel",
           "VehiclePose", "BACKEND", "__version__"]
