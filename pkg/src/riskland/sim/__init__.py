"""Scene model, vehicle plant, segmentation adapters and the trial loop."""

from .plant import EAVState, PlantConfig, step_plant
from .scene import Obstacle, Scene, render_labels, render_raster
from .segment import SegmenterConfig, segment

__all__ = ["EAVState", "PlantConfig", "step_plant", "Obstacle", "Scene", "render_labels",
           "render_raster", "SegmenterConfig", "segment"]
