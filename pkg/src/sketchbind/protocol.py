"""Command/event wire protocol and the session state machine.

Messages are JSON objects, one per transport message (text websocket
frames in the reference transport, or one line per message in script
files and event logs). Unknown fields are ignored for forward
compatibility; see protocol.md at the repository root for the schema
and one example per message type.

A session wraps an engine: commands are applied atomically between
ticks, every accepted command is acknowledged, and invalid commands
produce a fault without touching state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import Engine, StateDiff
from .errors import (
    BadCommandError,
    BadModeError,
    NotEstablishedError,
    OutOfRangeError,
    ProtocolVersionMismatchError,
    SketchbindError,
    fault_code,
)
from .geometry import Screen2
from .sketch import Stroke
from .viz import DEFAULT_STROBE_SPACING_M

PROTOCOL_VERSION = 1
MODES = ("select", "sketch", "annotation", "graph", "record", "play")
STROKE_OVERSHOOT_FRACTION = 0.25   # of max(width, height), each side


# --- commands ---

@dataclass
class Command:
    id: int | None = None
    at_frame: int = 0


@dataclass
class Hello(Command):
    protocol_version: int = PROTOCOL_VERSION


@dataclass
class Tap(Command):
    u: float = 0.0
    v: float = 0.0


@dataclass
class StrokeInput(Command):
    points: list = field(default_factory=list)  # [(u, v, t), ...]


@dataclass
class LabelEdit(Command):
    target: str = ""
    text: str = ""


@dataclass
class Mode(Command):
    mode: str = "select"


@dataclass
class PlaceGraph(Command):
    rect: tuple = (0.0, 0.0, 0.3, 0.2)  # plane coords: a, b, width, height


@dataclass
class Scrub(Command):
    t: float = 0.0


@dataclass
class Play(Command):
    pass


@dataclass
class Pause(Command):
    pass


_COMMAND_TYPES = {
    "hello": Hello, "tap": Tap, "stroke": StrokeInput, "labelEdit": LabelEdit,
    "mode": Mode, "placeGraph": PlaceGraph, "scrub": Scrub,
    "play": Play, "pause": Pause,
}


def command_from_dict(data: dict) -> Command:
    """Decode one command object; unknown fields are ignored."""
    if not isinstance(data, dict):
        raise BadCommandError("command must be an object")
    kind = data.get("type")
    cls = _COMMAND_TYPES.get(kind)
    if cls is None:
        raise BadCommandError(f"unknown command type {kind!r}")
    common = {"id": data.get("id"), "at_frame": int(data.get("atFrame", 0))}
    try:
        if cls is Hello:
            return Hello(**common, protocol_version=int(data.get("protocolVersion", -1)))
        if cls is Tap:
            return Tap(**common, u=float(data["u"]), v=float(data["v"]))
        if cls is StrokeInput:
            points = [(float(p[0]), float(p[1]), float(p[2])) for p in data["points"]]
            return StrokeInput(**common, points=points)
        if cls is LabelEdit:
            return LabelEdit(**common, target=str(data["target"]), text=str(data["text"]))
        if cls is Mode:
            return Mode(**common, mode=str(data["mode"]))
        if cls is PlaceGraph:
            rect = tuple(float(v) for v in data["rect"])
            if len(rect) != 4:
                raise BadCommandError("rect must be [a, b, width, height]")
            return PlaceGraph(**common, rect=rect)
        if cls is Scrub:
            return Scrub(**common, t=float(data["t"]))
        return cls(**common)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise BadCommandError(f"malformed {kind} command: {exc}") from exc


def command_to_dict(cmd: Command) -> dict:
    for kind, cls in _COMMAND_TYPES.items():
        if type(cmd) is cls:
            break
    else:
        raise TypeError(f"not a command: {cmd!r}")
    out = {"type": kind}
    if cmd.id is not None:
        out["id"] = cmd.id
    if cmd.at_frame:
        out["atFrame"] = cmd.at_frame
    if isinstance(cmd, Hello):
        out["protocolVersion"] = cmd.protocol_version
    elif isinstance(cmd, Tap):
        out.update(u=cmd.u, v=cmd.v)
    elif isinstance(cmd, StrokeInput):
        out["points"] = [list(p) for p in cmd.points]
    elif isinstance(cmd, LabelEdit):
        out.update(target=cmd.target, text=cmd.text)
    elif isinstance(cmd, Mode):
        out["mode"] = cmd.mode
    elif isinstance(cmd, PlaceGraph):
        out["rect"] = list(cmd.rect)
    elif isinstance(cmd, Scrub):
        out["t"] = cmd.t
    return out


# --- events ---

@dataclass(frozen=True)
class AckEvent:
    command_id: int | None

    def to_dict(self) -> dict:
        return {"event": "ack", "commandId": self.command_id}


@dataclass(frozen=True)
class FaultEvent:
    code: str
    message: str
    subject_id: str | None = None

    def to_dict(self) -> dict:
        return {"event": "fault", "code": self.code, "message": self.message,
                "subjectId": self.subject_id}


@dataclass(frozen=True)
class StateEvent:
    diff: StateDiff

    def to_dict(self) -> dict:
        out = {"event": "state"}
        out.update(self.diff.to_dict())
        return out


def event_to_json(event) -> str:
    return json.dumps(event.to_dict(), sort_keys=True)


# --- session ---

class Session:
    """One writer session against a recorded scene.

    Commands mutate state only between ticks; events come back in frame
    order, then arrival order. ``live=True`` models a not-yet-recorded
    scene, where timeline control is unavailable.
    """

    def __init__(self, scene, live: bool = False,
                 strobe_spacing: float = DEFAULT_STROBE_SPACING_M):
        self.engine = Engine(scene)
        self.scene = scene
        self.live = live
        self.strobe_spacing = strobe_spacing
        self.mode = "select"
        self.established = False
        self.playing = False
        self.cursor = 0  # next frame to tick

    # -- helpers --

    def _fault(self, exc: Exception, subject=None) -> list:
        return [FaultEvent(fault_code(exc), str(exc), subject)]

    def _check_points_in_bounds(self, points):
        margin = STROKE_OVERSHOOT_FRACTION * max(self.scene.width, self.scene.height)
        for u, v, _ in points:
            if not (-margin <= u <= self.scene.width + margin
                    and -margin <= v <= self.scene.height + margin):
                raise OutOfRangeError(
                    f"stroke point ({u}, {v}) beyond the overshoot margin")

    def _selection_frame(self) -> int:
        return min(self.cursor, len(self.scene) - 1)

    # -- command handling --

    def handle_command(self, cmd: Command) -> list:
        """Apply one command; returns the events it produced."""
        if isinstance(cmd, Hello):
            if cmd.protocol_version != PROTOCOL_VERSION:
                return self._fault(ProtocolVersionMismatchError(
                    f"protocol {cmd.protocol_version}, server speaks {PROTOCOL_VERSION}"))
            self.established = True
            return [AckEvent(cmd.id)]
        if not self.established:
            return self._fault(NotEstablishedError("send hello first"))
        try:
            extra = self._dispatch(cmd)
        except SketchbindError as exc:
            subject = cmd.target if isinstance(cmd, LabelEdit) else None
            return self._fault(exc, subject)
        return [AckEvent(cmd.id)] + list(extra)

    def _dispatch(self, cmd: Command) -> list:
        if isinstance(cmd, Mode):
            if cmd.mode not in MODES:
                raise BadModeError(f"unknown mode {cmd.mode!r}")
            if self.mode == "record" and cmd.mode != "record":
                self.engine.stop_recordings()
            if cmd.mode == "record" and self.mode != "record":
                self.engine.start_recordings()
            self.mode = cmd.mode
            if cmd.mode == "play":
                return [StateEvent(self._strobe_diff())]
            return []
        if isinstance(cmd, Tap):
            if self.mode != "select":
                raise BadModeError(f"taps select objects; mode is {self.mode!r}")
            self.engine.create_tracked_entity(Screen2(cmd.u, cmd.v),
                                              self._selection_frame())
            return []
        if isinstance(cmd, StrokeInput):
            if self.mode not in ("sketch", "annotation"):
                raise BadModeError(f"strokes need sketch or annotation mode, not {self.mode!r}")
            if len(cmd.points) < 2:
                raise BadCommandError("a stroke needs at least 2 points")
            self._check_points_in_bounds(cmd.points)
            stroke = Stroke([Screen2(u, v) for u, v, _ in cmd.points],
                            [t for _, _, t in cmd.points])
            self.engine.add_stroke(stroke, self._selection_frame(),
                                   annotation=(self.mode == "annotation"))
            return []
        if isinstance(cmd, LabelEdit):
            self.engine.label_edit(cmd.target, cmd.text)
            return []
        if isinstance(cmd, PlaceGraph):
            if self.mode != "graph":
                raise BadModeError(f"placing graphs needs graph mode, not {self.mode!r}")
            self.engine.place_graph(cmd.rect)
            return []
        if isinstance(cmd, Scrub):
            return [self.scrub(cmd.t)]
        if isinstance(cmd, Play):
            self.playing = True
            return []
        if isinstance(cmd, Pause):
            self.playing = False
            return []
        raise BadCommandError(f"unhandled command {cmd!r}")

    def _strobe_diff(self) -> StateDiff:
        if self.engine.last_frame_index is None:
            # nothing ticked yet: synthesize an empty frame-0 strobe view
            diff = StateDiff(frame=0, t=self.scene.times[0])
        else:
            i = self.engine.last_frame_index
            diff = StateDiff(frame=i, t=self.scene.times[i])
        diff.strobes = {
            eid: {"spacing": strobe.min_spacing,
                  "markers": [[m.x, m.y, m.z] for m in strobe.markers]}
            for eid, strobe in self.engine.strobes(self.strobe_spacing).items()
        }
        return diff

    # -- timeline --

    def tick(self, frame_index: int) -> StateEvent:
        diff = self.engine.tick(frame_index)
        self.cursor = frame_index + 1
        return StateEvent(diff)

    def scrub(self, t: float) -> StateEvent:
        """Deterministically rebuild the state at time ``t``.

        Equivalent to replaying ticks 0..frame(t) with the current
        definitions; cached tracking makes backward scrubs exact. The
        returned event carries a full snapshot, so scrubbing to the same
        t always yields the identical event.
        """
        if self.live:
            raise BadModeError("cannot scrub a live scene")
        if not (0 <= t <= self.scene.duration):
            raise OutOfRangeError(f"t={t} outside [0, {self.scene.duration}]")
        target = self.scene.frame_at(t)
        self.engine.replay_to(target)
        self.cursor = target + 1
        return StateEvent(self.engine.full_snapshot(self.strobe_spacing))
