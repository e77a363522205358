"""Responsive sketching over recorded scenes.

Bind user-drawn lines, angle arcs, and area polygons to color-tracked
objects in a recorded video scene, propagate expressions through a
dependency graph every frame, and export plots, variable logs, and
stroboscopic motion traces.
"""

from .engine import Engine, ParamRef, StateDiff
from .geometry import (
    CameraState,
    Plane2,
    ReferencePlane,
    Screen2,
    World3,
    plane_coords,
    project_to_screen,
    ray_cast_to_plane,
    world_of,
)
from .protocol import Session
from .scene_io import Frame, SceneRecording, VariableLog, decode_frame, load_scene
from .sketch import AngleArc, AreaPolygon, LineSegment, Stroke
from .tracker import ColorModel, TrackedEntity, TrackResult, track
from .viz import GraphPlot, MotionRecording, StrobeSet, strobe_markers

__version__ = "0.1.0"

__all__ = [
    "Engine", "ParamRef", "StateDiff", "Session",
    "CameraState", "Plane2", "ReferencePlane", "Screen2", "World3",
    "plane_coords", "project_to_screen", "ray_cast_to_plane", "world_of",
    "Frame", "SceneRecording", "VariableLog", "decode_frame", "load_scene",
    "AngleArc", "AreaPolygon", "LineSegment", "Stroke",
    "ColorModel", "TrackedEntity", "TrackResult", "track",
    "GraphPlot", "MotionRecording", "StrobeSet", "strobe_markers",
    "__version__",
]
