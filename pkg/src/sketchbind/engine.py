"""Named variables, parameter bindings, and the per-frame tick.

The engine owns all mutable session state (tracked entities, sketch
geometry, variables, bindings, plots, recordings) and advances it one
frame at a time. A tick runs a fixed pipeline:

  1. update tracked entities (cached per (entity, frame) for replays)
  2. resolve attached endpoints, annotation offsets, perpendicular
     constraints, and arc vertices
  3. recompute measured variables from geometry
  4. evaluate output channels in dependency order, then geometry
     bindings, against the resulting environment
  5. apply bound values to their target geometry
  6. append recording and plot samples
  7. emit a diff against the previous state

Evaluation faults (division by zero and friends) never abort a tick:
the faulting binding holds its last good value and is flagged in the
diff. Re-ticking the same frame is a fixed point and yields an empty
diff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace

from . import sketch as sk
from . import viz
from .errors import (
    BadCommandError,
    CyclicDependencyError,
    DegenerateGeometryError,
    EvalError,
    InvalidNameError,
    NameCollisionError,
    SketchbindError,
    UnknownEntityError,
    UnknownIdentifierError,
    fault_code,
)
from .expr import IDENT_RE, Expr, Ident, evaluate, free_variables, parse
from .geometry import Screen2, World3
from .scene_io import Frame, SceneRecording, VariableLog, decode_frame
from .tracker import (
    TrackedEntity,
    external_entity,
    rgb_to_hsv_image,
    select_color_target,
    track,
    update_entity,
    update_external,
)


@dataclass(frozen=True)
class ParamRef:
    """A bindable parameter: geometry property or named output channel.

    kind is one of ``length`` (line), ``arc-angle``, ``line-angle``
    (with ``reference`` naming the reference line), ``area``, or
    ``channel`` (``target_id`` is then the channel name).
    """

    kind: str
    target_id: str
    reference: str | None = None

    def key(self) -> str:
        if self.reference:
            return f"{self.kind}:{self.target_id}:{self.reference}"
        return f"{self.kind}:{self.target_id}"


@dataclass
class Variable:
    """A named value measured from geometry every tick."""

    name: str
    param: ParamRef
    value: float | None = None
    fault: str | None = None


@dataclass
class Binding:
    """An expression assigned to a parameter, re-evaluated every tick."""

    key: str
    target: ParamRef
    text: str
    expr: Expr
    last_value: float | None = None
    fault: str | None = None


@dataclass
class StateDiff:
    """Changed state for one tick; folding successive diffs rebuilds the state."""

    frame: int
    t: float
    full: bool = False
    camera: dict | None = None
    entities: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    arcs: dict = field(default_factory=dict)
    areas: dict = field(default_factory=dict)
    variables: dict = field(default_factory=dict)
    channels: dict = field(default_factory=dict)
    recording_flags: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)
    plot_appends: dict = field(default_factory=dict)
    recording_appends: dict = field(default_factory=dict)
    strobes: dict = field(default_factory=dict)
    faults: dict = field(default_factory=dict)

    _CATEGORIES = ("entities", "lines", "arcs", "areas", "variables", "channels",
                   "recording_flags", "plots", "plot_appends", "recording_appends",
                   "strobes", "faults")

    def is_empty(self) -> bool:
        return all(not getattr(self, name) for name in self._CATEGORIES)

    def to_dict(self) -> dict:
        out = {"frame": self.frame, "t": self.t, "full": self.full}
        if self.camera is not None:
            out["camera"] = self.camera
        for name in self._CATEGORIES:
            value = getattr(self, name)
            if value:
                out[name] = value
        return out


def _world_list(w: World3 | None):
    return None if w is None else [w.x, w.y, w.z]


def _camera_dict(camera) -> dict:
    return {
        "pos": [camera.position.x, camera.position.y, camera.position.z],
        "quat": list(camera.orientation),
        "fx": camera.fx, "fy": camera.fy, "cx": camera.cx, "cy": camera.cy,
        "width": camera.width, "height": camera.height,
    }


def resolve_order(edges: dict, names) -> list:
    """Topological order of ``names`` given ``edges[n] = set of prerequisites``.

    Deterministic: ties break lexicographically. Raises
    CyclicDependencyError when no order exists.
    """
    names = sorted(names)
    remaining = {n: set(edges.get(n, ())) & set(names) for n in names}
    order = []
    while remaining:
        ready = sorted(n for n, deps in remaining.items() if not deps)
        if not ready:
            cycle = ", ".join(sorted(remaining))
            raise CyclicDependencyError(f"dependency cycle among: {cycle}")
        for n in ready:
            order.append(n)
            del remaining[n]
        for deps in remaining.values():
            deps.difference_update(ready)
    return order


class Engine:
    """Single-owner mutable session state advanced by :meth:`tick`."""

    def __init__(self, scene: SceneRecording):
        self.scene = scene
        self.plane = scene.plane
        self.entities: dict = {}
        self.lines: dict = {}
        self.arcs: dict = {}
        self.areas: dict = {}
        self.graphs: dict = {}
        self.recordings: dict = {}
        self.variables: dict = {}
        self.bindings: dict = {}
        self.log = VariableLog()
        self.channel_order: list = []
        self.last_frame_index: int | None = None
        self._counters: dict = {}
        self._track_cache: dict = {}
        self._decode_cache: tuple | None = None
        self._last_snapshot: dict = {}
        self._last_append_t: float | None = None
        self._line_baselines: dict = {}
        for name in sorted({n for pts in scene.external_points.values() for n in pts}):
            self.entities[name] = external_entity(name)

    # --- identifiers ---

    def _next_id(self, prefix: str) -> str:
        n = self._counters.get(prefix, 0) + 1
        self._counters[prefix] = n
        return f"{prefix}-{n}"

    # --- frames ---

    def frame(self, index: int) -> Frame:
        if self._decode_cache is not None and self._decode_cache[0] == index:
            return self._decode_cache[1]
        frame = decode_frame(self.scene, index)
        self._decode_cache = (index, frame)
        return frame

    def frame_meta(self, index: int) -> Frame:
        """Frame timing and pose without decoding pixels."""
        return Frame(index, self.scene.times[index], None, self.scene.poses[index])

    # --- commands (applied between ticks) ---

    def create_tracked_entity(self, tap: Screen2, frame_index: int) -> TrackedEntity:
        frame = self.frame(frame_index)
        model = select_color_target(frame, tap)
        entity = TrackedEntity(id=self._next_id("entity"), model=model)
        result = track(frame, model)
        self._track_cache[(entity.id, frame_index)] = result
        update_entity(entity, frame, frame.camera, self.plane, result=result)
        self.entities[entity.id] = entity
        return entity

    def add_stroke(self, stroke: sk.Stroke, frame_index: int, annotation: bool = False):
        """Classify a stroke and create the entity it implies.

        Returns the created objects (one or two: closing an area creates
        both the closing line and the polygon).
        """
        camera = self.scene.poses[frame_index]
        view = SimpleNamespace(entities=self.entities, lines=self.lines,
                               mode="annotation" if annotation else "sketch")
        intent = sk.classify_stroke(stroke, view, camera, self.plane)
        if isinstance(intent, sk.NewAnnotation):
            entity = self.entities[intent.entity_id]
            line = sk.make_annotation_line(self._next_id("line"), stroke, entity,
                                           camera, self.plane)
            self.lines[line.id] = line
            return (line,)
        if isinstance(intent, sk.NewLine):
            line = sk.LineSegment(self._next_id("line"), intent.p1, intent.p2,
                                  intent.kind, perpendicular_to=intent.perpendicular_to)
            if line.perpendicular_to:
                sk.apply_perpendicular_constraint(line, self.lines[line.perpendicular_to],
                                                  self.plane)
            self.lines[line.id] = line
            return (line,)
        if isinstance(intent, sk.NewAngle):
            arc = sk.AngleArc(self._next_id("arc"), intent.line_a, intent.line_b,
                              intent.vertex)
            self.arcs[arc.id] = arc
            return (arc,)
        if isinstance(intent, sk.NewArea):
            closing = sk.LineSegment(self._next_id("line"), intent.closing_p1,
                                     intent.closing_p2, "static")
            self.lines[closing.id] = closing
            area = sk.AreaPolygon(self._next_id("area"),
                                  list(intent.chain) + [closing.id])
            self.areas[area.id] = area
            return (closing, area)
        raise TypeError(f"unhandled intent {intent!r}")

    def place_graph(self, rect) -> viz.GraphPlot:
        graph = viz.GraphPlot(self._next_id("graph"), tuple(float(v) for v in rect))
        self.graphs[graph.id] = graph
        return graph

    def start_recordings(self):
        for entity_id in self.entities:
            rec = self.recordings.setdefault(entity_id, viz.MotionRecording(entity_id))
            if not rec.active:
                viz.record_motion(rec, "start")

    def stop_recordings(self):
        for rec in self.recordings.values():
            if rec.active:
                viz.record_motion(rec, "stop")

    def strobes(self, min_spacing: float = viz.DEFAULT_STROBE_SPACING_M) -> dict:
        return {eid: viz.strobe_markers(rec, min_spacing)
                for eid, rec in self.recordings.items()}

    # --- names, variables, bindings ---

    def defined_names(self) -> set:
        names = set(self.variables)
        names.update(b.target.target_id for b in self.bindings.values()
                     if b.target.kind == "channel")
        return names

    def _variable_on(self, param: ParamRef) -> Variable | None:
        for var in self.variables.values():
            if var.param.key() == param.key():
                return var
        return None

    def _validate_param(self, param: ParamRef):
        if param.kind == "length" and param.target_id in self.lines:
            return
        if param.kind == "arc-angle" and param.target_id in self.arcs:
            return
        if param.kind == "line-angle" and param.target_id in self.lines \
                and param.reference in self.lines:
            return
        if param.kind == "area" and param.target_id in self.areas:
            return
        if param.kind == "channel":
            if IDENT_RE.fullmatch(param.target_id):
                return
            raise InvalidNameError(f"bad channel name {param.target_id!r}")
        raise UnknownEntityError(f"no parameter {param.key()}")

    def define_variable(self, param: ParamRef, name: str) -> Variable:
        """Register a measured variable; the name tracks measure(param) each tick."""
        if not name or not IDENT_RE.fullmatch(name):
            raise InvalidNameError(f"bad variable name {name!r}")
        self._validate_param(param)
        existing = self.variables.get(name)
        if existing is not None and existing.param.key() != param.key():
            raise NameCollisionError(f"{name!r} already measures {existing.param.key()}")
        if any(b.target.kind == "channel" and b.target.target_id == name
               for b in self.bindings.values()):
            raise NameCollisionError(f"{name!r} is already an output channel")
        current = self._variable_on(param)
        if current is not None and current.name == name:
            return current
        if current is not None:
            # renaming the parameter: drop the old name
            del self.variables[current.name]
            var = Variable(name, param, value=current.value)
        else:
            var = Variable(name, param)
        self.variables[name] = var
        try:
            self._recompute_order()
        except CyclicDependencyError:
            del self.variables[name]
            if current is not None:
                self.variables[current.name] = current
                self._recompute_order()
            raise
        self.log.register(name)
        try:
            var.value = self.measure_param(param)
        except SketchbindError as exc:
            var.fault = fault_code(exc)
        return var

    def bind_parameter(self, target: ParamRef, text: str) -> Binding:
        """Attach an expression to a parameter; rejects unknown names and cycles."""
        self._validate_param(target)
        expr = parse(text)
        free = free_variables(expr)
        defined = self.defined_names()
        if target.kind == "channel" and target.target_id in self.variables:
            raise NameCollisionError(
                f"{target.target_id!r} is already a measured variable")
        missing = sorted(free - defined)
        if missing:
            raise UnknownIdentifierError(missing[0])
        if target.kind != "channel":
            line_id = target.target_id
            if target.kind == "arc-angle":
                arc = self.arcs[target.target_id]
                line_id = self._rotating_line(arc)
            if line_id in self.lines and self.lines[line_id].perpendicular_to:
                raise BadCommandError(
                    f"line {line_id} already carries a perpendicular constraint")
        key = target.key()
        previous = self.bindings.get(key)
        binding = Binding(key, target, text, expr)
        self.bindings[key] = binding
        try:
            self._recompute_order()
        except CyclicDependencyError:
            if previous is None:
                del self.bindings[key]
            else:
                self.bindings[key] = previous
            self._recompute_order()
            raise
        if target.kind == "channel":
            self.log.register(target.target_id)
        return binding

    def _rotating_line(self, arc: sk.AngleArc) -> str:
        la, lb = self.lines[arc.line_a], self.lines[arc.line_b]
        b_attached = any(p.kind == "attached" for p in lb.endpoints())
        return arc.line_a if b_attached else arc.line_b

    def _dependency_edges(self) -> dict:
        """edges[name] = names it depends on, via expressions targeting it."""
        edges: dict = {}
        for binding in self.bindings.values():
            if binding.target.kind == "channel":
                outs = [binding.target.target_id]
            else:
                var = self._variable_on(binding.target)
                outs = [var.name] if var else []
            for out in outs:
                edges.setdefault(out, set()).update(free_variables(binding.expr))
        return edges

    def _recompute_order(self):
        edges = self._dependency_edges()
        names = self.defined_names()
        order = resolve_order(edges, names)
        channels = {b.target.target_id for b in self.bindings.values()
                    if b.target.kind == "channel"}
        self.channel_order = [n for n in order if n in channels]

    def label_edit(self, target: str, text: str):
        """Route a label edit: graph axes, output channels, or entity parameters.

        On a parameter, a bare fresh name defines a measured variable; a
        bare existing name binds the parameter to it (unless the
        parameter is already named, which is a collision); anything else
        parses as a binding expression.
        """
        if ":" in target:
            head, _, rest = target.partition(":")
            if head in self.graphs and rest in ("x", "y"):
                viz.bind_axis(self.graphs[head], rest, text, self.defined_names())
                return self.graphs[head]
            if head == "channel":
                return self.bind_parameter(ParamRef("channel", rest), text)
            if head in self.lines and rest.startswith("angle:"):
                ref = rest.split(":", 1)[1]
                return self._label_edit_param(ParamRef("line-angle", head, ref), text)
            raise UnknownEntityError(f"no label target {target!r}")
        if target in self.lines:
            return self._label_edit_param(ParamRef("length", target), text)
        if target in self.arcs:
            return self._label_edit_param(ParamRef("arc-angle", target), text)
        if target in self.areas:
            return self._label_edit_param(ParamRef("area", target), text)
        raise UnknownEntityError(f"no label target {target!r}")

    def _label_edit_param(self, param: ParamRef, text: str):
        expr = parse(text)
        entity = self._param_entity(param)
        if isinstance(expr, Ident):
            name = expr.name
            own = self._variable_on(param)
            if name in self.defined_names():
                if own is not None and own.name == name:
                    return own
                if own is not None:
                    raise NameCollisionError(
                        f"{param.key()} is already named {own.name!r}")
                binding = self.bind_parameter(param, text)
                entity.label = name
                return binding
            var = self.define_variable(param, name)
            entity.label = name
            return var
        binding = self.bind_parameter(param, text)
        entity.label = text
        return binding

    def _param_entity(self, param: ParamRef):
        if param.kind in ("length", "line-angle"):
            return self.lines[param.target_id]
        if param.kind == "arc-angle":
            return self.arcs[param.target_id]
        if param.kind == "area":
            return self.areas[param.target_id]
        raise UnknownEntityError(param.key())

    # --- measurement and application ---

    def measure_param(self, param: ParamRef) -> float:
        if param.kind == "length":
            return sk.measure_length(self.lines[param.target_id])
        if param.kind == "arc-angle":
            return sk.measure_angle(self.arcs[param.target_id], self.lines, self.plane)
        if param.kind == "line-angle":
            return sk.line_angle_vs_reference(self.lines[param.target_id],
                                              self.lines[param.reference], self.plane)
        if param.kind == "area":
            return sk.measure_area(self.areas[param.target_id], self.lines, self.plane)
        raise UnknownEntityError(f"cannot measure {param.key()}")

    def _apply_binding(self, target: ParamRef, value: float, key: str):
        if target.kind == "length":
            sk.set_line_length(self.lines[target.target_id], value, key)
        elif target.kind == "arc-angle":
            sk.set_arc_angle(self.arcs[target.target_id], self.lines, value,
                             self.plane, key)
        elif target.kind == "line-angle":
            sk.set_line_angle(self.lines[target.target_id],
                              self.lines[target.reference], value, self.plane, key)
        elif target.kind == "area":
            sk.set_area(self.areas[target.target_id], self.lines, value,
                        self.plane, key)
        else:
            raise UnknownEntityError(f"cannot apply to {target.key()}")

    # --- the tick ---

    def _capture_baselines(self):
        # creation-time endpoint poses; restoring them before a replay makes
        # incremental rotations path-independent (scrubs are bit-exact)
        for line_id, line in self.lines.items():
            if line_id not in self._line_baselines:
                self._line_baselines[line_id] = tuple(
                    (ep.kind, ep.world, ep.binding_key) for ep in line.endpoints())

    def tick(self, frame_index: int) -> StateDiff:
        self._capture_baselines()
        t = self.scene.times[frame_index]
        camera = self.scene.poses[frame_index]
        meta = self.frame_meta(frame_index)

        # 1. tracked entities (cache first, decode only on a miss)
        hsv = None
        for entity_id, entity in self.entities.items():
            if entity.external:
                point = self.scene.external_points.get(frame_index, {}).get(entity_id)
                update_external(entity, meta, camera, point)
                continue
            cache_key = (entity_id, frame_index)
            result = self._track_cache.get(cache_key)
            if result is None:
                frame = self.frame(frame_index)
                if hsv is None:
                    hsv = rgb_to_hsv_image(frame.pixels)
                result = track(frame, entity.model, hsv=hsv)
                self._track_cache[cache_key] = result
            update_entity(entity, meta, camera, self.plane, result=result)

        # 2. resolve endpoints, constraints, arc vertices
        for line in self.lines.values():
            if line.kind == "annotation":
                anchor = self.entities.get(line.annotation_anchor)
                if anchor is not None and anchor.world_pos is not None:
                    sk.update_annotation_line(line, anchor.world_pos)
                continue
            for endpoint in line.endpoints():
                if endpoint.kind == "attached":
                    ent = self.entities.get(endpoint.entity_id)
                    if ent is not None and ent.world_pos is not None:
                        endpoint.world = ent.world_pos
        for line in self.lines.values():
            if line.perpendicular_to and line.perpendicular_to in self.lines:
                try:
                    sk.apply_perpendicular_constraint(
                        line, self.lines[line.perpendicular_to], self.plane)
                except DegenerateGeometryError:
                    pass
        for arc in self.arcs.values():
            try:
                arc.vertex = sk.compute_arc_vertex(
                    self.lines[arc.line_a], self.lines[arc.line_b], self.plane)
            except DegenerateGeometryError:
                pass

        # 3. measured variables
        faults = {}
        for name, var in self.variables.items():
            try:
                var.value = self.measure_param(var.param)
                var.fault = None
            except SketchbindError as exc:
                var.fault = fault_code(exc)
                faults[f"var:{name}"] = var.fault
        env = {name: var.value for name, var in self.variables.items()
               if var.value is not None}

        # 4a. output channels in dependency order
        for channel in self.channel_order:
            binding = self.bindings[f"channel:{channel}"]
            try:
                binding.last_value = evaluate(binding.expr, env)
                binding.fault = None
            except EvalError as exc:
                binding.fault = fault_code(exc)
                faults[binding.key] = binding.fault
            if binding.last_value is not None:
                env[channel] = binding.last_value

        # 4b + 5. geometry bindings: evaluate, then apply
        for key in sorted(self.bindings):
            binding = self.bindings[key]
            if binding.target.kind == "channel":
                continue
            try:
                value = evaluate(binding.expr, env)
                self._apply_binding(binding.target, value, key)
                binding.last_value = value
                binding.fault = None
            except (EvalError, SketchbindError) as exc:
                binding.fault = fault_code(exc)
                faults[key] = binding.fault

        # 6. recordings and plots (skipped when re-ticking the same time)
        plot_appends = {}
        recording_appends = {}
        if self._last_append_t is None or t > self._last_append_t:
            for rec in self.recordings.values():
                entity = self.entities.get(rec.entity_id)
                if rec.active and entity is not None and entity.world_pos is not None:
                    viz.append_recording(rec, t, entity.world_pos)
                    recording_appends[rec.entity_id] = [t] + _world_list(entity.world_pos)
            for graph_id, graph in self.graphs.items():
                appended = viz.append_samples(graph, env, t)
                if appended:
                    plot_appends[graph_id] = {
                        "x": graph.x_axis or "time",
                        "samples": {name: list(s) for name, s in appended.items()},
                    }
            if env:
                self.log.append(t, env)
            self._last_append_t = t

        diff = self._diff(frame_index, t, camera, faults,
                          plot_appends, recording_appends)
        self.last_frame_index = frame_index
        return diff

    # --- diffs and snapshots ---

    def _state_tables(self, faults: dict) -> dict:
        entities = {}
        for entity_id, ent in self.entities.items():
            entities[entity_id] = {
                "screen": None if ent.screen_pos is None else [ent.screen_pos.u, ent.screen_pos.v],
                "world": _world_list(ent.world_pos),
                "found": ent.found,
                "staleSince": ent.stale_since,
            }
        lines = {}
        for line_id, line in self.lines.items():
            lines[line_id] = {
                "p1": _world_list(line.p1.world),
                "p2": _world_list(line.p2.world),
                "kind": line.kind,
                "label": line.label,
                "value": sk.measure_length(line),
                "perpendicularTo": line.perpendicular_to,
            }
        arcs = {}
        for arc_id, arc in self.arcs.items():
            try:
                value = sk.measure_angle(arc, self.lines, self.plane)
            except SketchbindError:
                value = None
            arcs[arc_id] = {
                "lineA": arc.line_a, "lineB": arc.line_b,
                "vertex": _world_list(arc.vertex),
                "label": arc.label, "value": value,
            }
        areas = {}
        for area_id, area in self.areas.items():
            try:
                value = sk.measure_area(area, self.lines, self.plane)
            except SketchbindError:
                value = None
            areas[area_id] = {
                "boundary": list(area.boundary),
                "vertices": [_world_list(v) for v in sk.area_vertices(area, self.lines)],
                "label": area.label, "value": value,
            }
        channels = {b.target.target_id: b.last_value for b in self.bindings.values()
                    if b.target.kind == "channel" and b.last_value is not None}
        variables = {name: var.value for name, var in self.variables.items()
                     if var.value is not None}
        recording_flags = {eid: rec.active for eid, rec in self.recordings.items()}
        return {
            "entities": entities, "lines": lines, "arcs": arcs, "areas": areas,
            "variables": variables, "channels": channels,
            "recording_flags": recording_flags, "faults": dict(faults),
        }

    def _diff(self, frame_index, t, camera, faults,
              plot_appends, recording_appends) -> StateDiff:
        tables = self._state_tables(faults)
        diff = StateDiff(frame=frame_index, t=t)
        camera_dict = _camera_dict(camera)
        if self._last_snapshot.get("camera") != camera_dict:
            diff.camera = camera_dict
        for name, table in tables.items():
            previous = self._last_snapshot.get(name, {})
            # removed keys are tombstoned with None so folding diffs
            # reproduces the full state
            changed = {k: table.get(k) for k in sorted(set(table) | set(previous))
                       if previous.get(k) != table.get(k)}
            setattr(diff, name, changed)
        diff.plot_appends = plot_appends
        diff.recording_appends = recording_appends
        self._last_snapshot = dict(tables)
        self._last_snapshot["camera"] = camera_dict
        return diff

    def full_snapshot(self, strobe_spacing: float = viz.DEFAULT_STROBE_SPACING_M) -> StateDiff:
        """Complete state as a diff (used after scrubs); not incremental."""
        if self.last_frame_index is None:
            raise ValueError("no frame has been ticked yet")
        frame_index = self.last_frame_index
        tables = self._state_tables(self._current_faults())
        diff = StateDiff(frame=frame_index, t=self.scene.times[frame_index], full=True)
        diff.camera = _camera_dict(self.scene.poses[frame_index])
        for name, table in tables.items():
            setattr(diff, name, table)
        diff.plots = {
            graph_id: {
                "rect": list(graph.rect),
                "x": graph.x_axis or "time",
                "window": graph.window,
                "buffers": {name: [list(s) for s in buf]
                            for name, buf in graph.buffers.items()},
            }
            for graph_id, graph in self.graphs.items()
        }
        diff.strobes = {
            eid: {"spacing": strobe.min_spacing,
                  "markers": [_world_list(m) for m in strobe.markers]}
            for eid, strobe in self.strobes(strobe_spacing).items()
        }
        return diff

    def _current_faults(self) -> dict:
        faults = {}
        for name, var in self.variables.items():
            if var.fault:
                faults[f"var:{name}"] = var.fault
        for key, binding in self.bindings.items():
            if binding.fault:
                faults[key] = binding.fault
        return faults

    def env(self) -> dict:
        out = {name: var.value for name, var in self.variables.items()
               if var.value is not None}
        for binding in self.bindings.values():
            if binding.target.kind == "channel" and binding.last_value is not None:
                out[binding.target.target_id] = binding.last_value
        return out

    # --- replay support ---

    def reset_dynamic(self):
        """Rewind dynamic state so ticks 0..k can be replayed exactly.

        Definitions (entities, sketches, variables, bindings, graphs)
        persist, but accumulated samples are dropped, derived geometry
        returns to its creation pose, and held values clear; tracking
        results stay cached so the replay is cheap and bit-exact.
        """
        self._capture_baselines()
        for entity in self.entities.values():
            entity.found = False
            entity.stale_since = None
        for line_id, baseline in self._line_baselines.items():
            line = self.lines.get(line_id)
            if line is None:
                continue
            for endpoint, (kind, world, binding_key) in zip(line.endpoints(), baseline):
                endpoint.kind = kind
                endpoint.world = world
                endpoint.binding_key = binding_key
        for graph in self.graphs.values():
            graph.buffers = {name: [] for name in graph.y_series}
        for rec in self.recordings.values():
            rec.samples = []
        for var in self.variables.values():
            var.fault = None
            var.value = None
        for binding in self.bindings.values():
            binding.fault = None
            binding.last_value = None
        self.log.clear_samples()
        self._last_snapshot = {}
        self._last_append_t = None
        self.last_frame_index = None

    def replay_to(self, frame_index: int):
        self.reset_dynamic()
        for i in range(frame_index + 1):
            self.tick(i)
