"""Layered street-scene labeling from stereo pairs and class scores."""
from .appcost import appearance_from_scores, heuristic_scores
from .core import (
    ColumnAssignment,
    EngineConfig,
    GroundPlaneModel,
    Label,
    SceneLabeling,
    ground_disparity,
    load_config,
    render_maps,
)
from .depthcost import StereoCostVolume, build_cost_volume, naive_cost_volume
from .energy import ColumnCosts, column_energy, prefix_tables
from .estimator import LayeredSceneLabeler, label_scene
from .infer import infer_column, infer_scene, q_table
from .metrics import IoUReport, evaluate, iou
from .oracle import brute_force_column
from .synth import SynthScene, generate

__version__ = "0.1.0"

__all__ = [
    "ColumnAssignment", "ColumnCosts", "EngineConfig", "GroundPlaneModel", "IoUReport",
    "Label", "LayeredSceneLabeler", "SceneLabeling", "StereoCostVolume", "SynthScene",
    "appearance_from_scores", "brute_force_column", "build_cost_volume", "column_energy",
    "evaluate", "generate", "ground_disparity", "heuristic_scores", "infer_column",
    "infer_scene", "iou", "label_scene", "load_config", "naive_cost_volume",
    "prefix_tables", "q_table", "render_maps",
]
