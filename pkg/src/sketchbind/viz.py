"""Responsive graph plots, motion recording, and stroboscopic markers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlreadyRecordingError, NotRecordingError, UnknownIdentifierError
from .geometry import World3

DEFAULT_WINDOW_S = 10.0
DEFAULT_STROBE_SPACING_M = 0.03


@dataclass
class GraphPlot:
    """A plot placed on the reference plane.

    ``x_axis`` is None for time mode, else a variable name. In time mode
    the buffers keep a rolling window of ``window`` seconds.
    """

    id: str
    rect: tuple                       # (a, b, width, height) in plane coords, meters
    x_axis: str | None = None
    y_series: list = field(default_factory=list)
    buffers: dict = field(default_factory=dict)  # series name -> list of (x, y)
    window: float = DEFAULT_WINDOW_S

    @property
    def bound(self) -> bool:
        return bool(self.y_series)


def bind_axis(graph: GraphPlot, axis: str, text: str, defined_names) -> None:
    """Bind comma-separated variable names to a plot axis.

    The y axis takes one or more series; the x axis takes a single
    variable name, or the word ``time`` to return to time mode. Binding
    the y axis resets the sample buffers.
    """
    names = [part.strip() for part in text.split(",") if part.strip()]
    if axis == "x":
        if len(names) != 1:
            raise ValueError("x axis takes exactly one variable name")
        if names[0] == "time":
            graph.x_axis = None
        else:
            if names[0] not in defined_names:
                raise UnknownIdentifierError(names[0])
            graph.x_axis = names[0]
        graph.buffers = {name: [] for name in graph.y_series}
        return
    if axis != "y":
        raise ValueError(f"unknown axis {axis!r}")
    if not names:
        raise ValueError("y axis needs at least one variable name")
    for name in names:
        if name not in defined_names:
            raise UnknownIdentifierError(name)
    graph.y_series = names
    graph.buffers = {name: [] for name in names}


def append_samples(graph: GraphPlot, env: dict, t: float):
    """Append one sample per bound series; returns what was appended.

    No-op (returns None) while the graph is unbound. Time-mode buffers
    are trimmed to the rolling window after the append.
    """
    if not graph.bound:
        return None
    if graph.x_axis is None:
        x = t
    elif graph.x_axis in env:
        x = float(env[graph.x_axis])
    else:
        return None
    appended = {}
    for name in graph.y_series:
        if name not in env:
            continue
        buf = graph.buffers.setdefault(name, [])
        sample = (x, float(env[name]))
        buf.append(sample)
        if graph.x_axis is None:
            cutoff = t - graph.window
            while buf and buf[0][0] < cutoff:
                buf.pop(0)
        appended[name] = sample
    return appended or None


@dataclass
class MotionRecording:
    """World positions of one tracked entity, one sample per tick while active."""

    entity_id: str
    samples: list = field(default_factory=list)  # (t, World3)
    active: bool = False


def record_motion(rec: MotionRecording, action: str) -> MotionRecording:
    if action == "start":
        if rec.active:
            raise AlreadyRecordingError(f"already recording {rec.entity_id}")
        rec.active = True
    elif action == "stop":
        if not rec.active:
            raise NotRecordingError(f"not recording {rec.entity_id}")
        rec.active = False
    else:
        raise ValueError(f"action must be start or stop, got {action!r}")
    return rec


def append_recording(rec: MotionRecording, t: float, pos: World3):
    if not rec.active:
        return
    if rec.samples and t <= rec.samples[-1][0]:
        raise ValueError("recording timestamps must be strictly increasing")
    rec.samples.append((t, pos))


@dataclass(frozen=True)
class StrobeSet:
    markers: tuple               # World3, ordered
    min_spacing: float


def strobe_markers(rec: MotionRecording, min_spacing: float = DEFAULT_STROBE_SPACING_M) -> StrobeSet:
    """Greedy spacing filter over a recording.

    Keeps the first sample, then every sample at least ``min_spacing``
    meters from the last kept one; zero spacing keeps everything. The
    markers are always a subsequence of the recorded samples.
    """
    if min_spacing < 0:
        raise ValueError("min_spacing must be >= 0")
    kept = []
    last = None
    for _, pos in rec.samples:
        if last is None:
            kept.append(pos)
            last = pos.as_array()
            continue
        if min_spacing == 0 or np.linalg.norm(pos.as_array() - last) >= min_spacing:
            kept.append(pos)
            last = pos.as_array()
    return StrobeSet(tuple(kept), min_spacing)
