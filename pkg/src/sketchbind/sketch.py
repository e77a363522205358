"""Sketch entities, stroke classification, and geometric measurement.

All sketch geometry lives on the reference plane: stroke endpoints are
unprojected onto it, and rotations/scaling happen in plane coordinates.
Classification looks only at the stroke's start and end points:

  1. both ends at the two open ends of a chain of existing lines
     (>= 2 of them) -> close the chain into an area polygon;
  2. both ends on two distinct existing lines -> an angle arc;
  3. otherwise a new line segment, each end snapping to a tracked
     entity first, then to an existing line endpoint, then free.

A new line within ``PERPENDICULAR_TOL_DEG`` of a right angle against a
nearby line picks up a perpendicular constraint against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BehindCameraError,
    DegenerateGeometryError,
    DomainError,
    NoAnchorError,
    StrokeTooShortError,
)
from .geometry import (
    Plane2,
    ReferencePlane,
    Screen2,
    World3,
    plane_coords,
    project_to_screen,
    ray_cast_to_plane,
    world_of,
)

SNAP_FRACTION = 0.025          # of min(frame width, height), in pixels
PERPENDICULAR_TOL_DEG = 10.0
PARALLEL_VERTEX_TOL_DEG = 1.0  # below this, use the closest-point midpoint as vertex


def snap_radius_px(width: int, height: int) -> float:
    return SNAP_FRACTION * min(width, height)


@dataclass
class Endpoint:
    kind: str                   # "fixed" | "attached" | "derived"
    world: World3
    entity_id: str | None = None
    binding_key: str | None = None

    @staticmethod
    def fixed(world: World3) -> "Endpoint":
        return Endpoint("fixed", world)

    @staticmethod
    def attached(entity_id: str, world: World3) -> "Endpoint":
        return Endpoint("attached", world, entity_id=entity_id)


@dataclass
class LineSegment:
    id: str
    p1: Endpoint
    p2: Endpoint
    kind: str                   # "static" | "dynamic" | "annotation"
    label: str | None = None
    perpendicular_to: str | None = None
    annotation_offset: np.ndarray | None = None
    annotation_anchor: str | None = None

    def __post_init__(self):
        attached = [p for p in (self.p1, self.p2) if p.kind == "attached"]
        if self.kind == "dynamic" and not attached:
            raise ValueError("dynamic line needs an attached endpoint")
        if self.kind == "static" and attached:
            raise ValueError("static line cannot have attached endpoints")
        if self.kind == "annotation":
            if len(attached) != 1 or self.annotation_offset is None:
                raise ValueError("annotation line needs one attached endpoint and an offset")

    def endpoints(self):
        return (self.p1, self.p2)


@dataclass
class AngleArc:
    id: str
    line_a: str
    line_b: str
    vertex: World3
    label: str | None = None


@dataclass
class AreaPolygon:
    id: str
    boundary: list              # ordered line ids forming a closed loop
    label: str | None = None

    def __post_init__(self):
        if len(self.boundary) < 3:
            raise ValueError("area polygon needs at least 3 boundary lines")


@dataclass
class Stroke:
    points: list                # Screen2, ordered
    times: list                 # seconds, one per point

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("stroke needs at least 2 points")
        if len(self.times) != len(self.points):
            raise ValueError("one timestamp per stroke point")


# --- classification intents ---

@dataclass
class NewLine:
    p1: Endpoint
    p2: Endpoint
    kind: str
    perpendicular_to: str | None = None


@dataclass
class NewAngle:
    line_a: str
    line_b: str
    vertex: World3


@dataclass
class NewArea:
    chain: list                 # existing line ids, traversal order
    closing_p1: Endpoint
    closing_p2: Endpoint


@dataclass
class NewAnnotation:
    entity_id: str


SketchIntent = NewLine | NewAngle | NewArea | NewAnnotation


def _seg_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0:
        return float(np.linalg.norm(p - a))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _screen_segments(lines: dict, camera) -> dict:
    """Project each line's endpoints; lines behind the camera are skipped."""
    out = {}
    for line_id, line in lines.items():
        try:
            a = project_to_screen(camera, line.p1.world).as_array()
            b = project_to_screen(camera, line.p2.world).as_array()
        except BehindCameraError:
            continue
        out[line_id] = (a, b)
    return out


def _nearest_line(point: np.ndarray, segments: dict, snap: float):
    best = None
    for line_id in sorted(segments):
        a, b = segments[line_id]
        d = _seg_distance(point, a, b)
        if d <= snap and (best is None or d < best[1]):
            best = (line_id, d)
    return best


def _nearest_entity(point: np.ndarray, entities: dict, snap: float):
    best = None
    for entity_id in sorted(entities):
        ent = entities[entity_id]
        if ent.screen_pos is None or ent.world_pos is None:
            continue
        d = float(np.linalg.norm(point - ent.screen_pos.as_array()))
        if d <= snap and (best is None or d < best[1]):
            best = (entity_id, d)
    return best


def _endpoint_clusters(lines: dict, segments: dict, snap: float):
    """Union endpoints lying within the snap radius into junctions."""
    nodes = []  # (line_id, end_index, screen xy)
    for line_id in sorted(segments):
        a, b = segments[line_id]
        nodes.append((line_id, 0, a))
        nodes.append((line_id, 1, b))
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if np.linalg.norm(nodes[i][2] - nodes[j][2]) <= snap:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    clusters = {}
    for i, (line_id, end, xy) in enumerate(nodes):
        clusters.setdefault(find(i), []).append((line_id, end, xy))
    return list(clusters.values())


def _chain_between(lines: dict, segments: dict, snap: float,
                   start_pt: np.ndarray, end_pt: np.ndarray):
    """Line ids chaining the junction at start_pt to the one at end_pt."""
    clusters = _endpoint_clusters(lines, segments, snap)

    def cluster_at(pt):
        best = None
        for idx, members in enumerate(clusters):
            d = min(float(np.linalg.norm(pt - xy)) for _, _, xy in members)
            if d <= snap and (best is None or d < best[1]):
                best = (idx, d)
        return None if best is None else best[0]

    start_c, end_c = cluster_at(start_pt), cluster_at(end_pt)
    if start_c is None or end_c is None or start_c == end_c:
        return None
    # line -> (cluster of p1, cluster of p2)
    line_ends = {}
    for idx, members in enumerate(clusters):
        for line_id, end, _ in members:
            ends = line_ends.setdefault(line_id, [None, None])
            ends[end] = idx
    adjacency = {}
    for line_id, (c1, c2) in sorted(line_ends.items()):
        if c1 is None or c2 is None or c1 == c2:
            continue
        adjacency.setdefault(c1, []).append((line_id, c2))
        adjacency.setdefault(c2, []).append((line_id, c1))
    # BFS, deterministic neighbor order
    queue = [(start_c, [])]
    seen = {start_c}
    while queue:
        cluster, path = queue.pop(0)
        if cluster == end_c:
            return path if len(path) >= 2 else None
        for line_id, nxt in sorted(adjacency.get(cluster, [])):
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, path + [line_id]))
    return None


def _snap_line_endpoint(point: np.ndarray, lines: dict, segments: dict, snap: float):
    """Nearest existing line endpoint within the snap radius, or None."""
    best = None
    for line_id in sorted(segments):
        a, b = segments[line_id]
        line = lines[line_id]
        for end_idx, (xy, endpoint) in enumerate(((a, line.p1), (b, line.p2))):
            d = float(np.linalg.norm(point - xy))
            if d <= snap and (best is None or d < best[1]):
                best = (endpoint, d, (line_id, end_idx))
    return None if best is None else best[0]


def _angle_pair(s0: np.ndarray, s1: np.ndarray, segments: dict, snap: float):
    """Distinct (lineA near s0, lineB near s1) minimizing summed distance."""
    best = None
    for la in sorted(segments):
        a0, b0 = segments[la]
        d0 = _seg_distance(s0, a0, b0)
        if d0 > snap:
            continue
        for lb in sorted(segments):
            if lb == la:
                continue
            a1, b1 = segments[lb]
            d1 = _seg_distance(s1, a1, b1)
            if d1 > snap:
                continue
            key = (d0 + d1, la, lb)
            if best is None or key < best:
                best = (d0 + d1, la, lb)
    return None if best is None else (best[1], best[2])


def _line_direction_2d(line: LineSegment, plane: ReferencePlane) -> np.ndarray:
    a = plane_coords(plane, line.p1.world).as_array()
    b = plane_coords(plane, line.p2.world).as_array()
    d = b - a
    n = np.linalg.norm(d)
    if n == 0:
        raise DegenerateGeometryError(f"line {line.id} has zero length")
    return d / n


def classify_stroke(stroke: Stroke, state, camera, plane: ReferencePlane) -> SketchIntent:
    """Decide what a finished stroke creates.

    ``state`` must expose ``entities`` and ``lines`` dicts and a ``mode``
    string; classification itself never mutates it.
    """
    snap = snap_radius_px(camera.width, camera.height)
    s0 = stroke.points[0].as_array()
    s1 = stroke.points[-1].as_array()
    if float(np.linalg.norm(s1 - s0)) < snap:
        raise StrokeTooShortError("stroke chord is below the snap radius")

    entities = dict(state.entities)
    lines = dict(state.lines)
    segments = _screen_segments(lines, camera)
    entity_hits = (_nearest_entity(s0, entities, snap),
                   _nearest_entity(s1, entities, snap))

    if getattr(state, "mode", None) == "annotation":
        hit = min((h for h in entity_hits if h), key=lambda h: h[1], default=None)
        if hit is None:
            raise NoAnchorError("annotation stroke must start or end at a tracked entity")
        return NewAnnotation(hit[0])

    # a stroke end on a tracked object always means attachment, so the
    # angle/area interpretations only apply to strokes clear of entities
    if not any(entity_hits):
        chain = _chain_between(lines, segments, snap, s0, s1)
        if chain is not None:
            closing_p1 = _snap_line_endpoint(s0, lines, segments, snap)
            closing_p2 = _snap_line_endpoint(s1, lines, segments, snap)
            return NewArea(chain,
                           Endpoint.fixed(closing_p1.world),
                           Endpoint.fixed(closing_p2.world))

        pair = _angle_pair(s0, s1, segments, snap)
        if pair is not None:
            la, lb = pair
            vertex = compute_arc_vertex(lines[la], lines[lb], plane)
            return NewAngle(la, lb, vertex)

    endpoints = []
    for point, entity_hit in zip((s0, s1), entity_hits):
        if entity_hit is not None:
            ent = entities[entity_hit[0]]
            endpoints.append(Endpoint.attached(ent.id, ent.world_pos))
            continue
        snapped = _snap_line_endpoint(point, lines, segments, snap)
        if snapped is not None:
            endpoints.append(Endpoint.fixed(snapped.world))
            continue
        endpoints.append(Endpoint.fixed(
            ray_cast_to_plane(camera, plane, Screen2(float(point[0]), float(point[1])))))
    p1, p2 = endpoints
    kind = "dynamic" if "attached" in (p1.kind, p2.kind) else "static"

    perpendicular_to = None
    new_dir = plane_coords(plane, p2.world).as_array() - plane_coords(plane, p1.world).as_array()
    norm = np.linalg.norm(new_dir)
    if norm > 0:
        new_dir /= norm
        candidates = []
        for line_id in sorted(segments):
            a, b = segments[line_id]
            d = min(_seg_distance(s0, a, b), _seg_distance(s1, a, b))
            if d <= snap:
                candidates.append((d, line_id))
        for _, line_id in sorted(candidates):
            try:
                ref_dir = _line_direction_2d(lines[line_id], plane)
            except DegenerateGeometryError:
                continue
            angle = math.degrees(math.acos(min(1.0, abs(float(new_dir @ ref_dir)))))
            if abs(90.0 - angle) <= PERPENDICULAR_TOL_DEG:
                perpendicular_to = line_id
                break
    return NewLine(p1, p2, kind, perpendicular_to)


# --- measurement ---

def measure_length(line: LineSegment) -> float:
    return float(np.linalg.norm(line.p2.world.as_array() - line.p1.world.as_array()))


def _closest_points_on_segments(a1, a2, b1, b2):
    # Lumelsky's clamped parametric closest pair between two 2D segments
    d1, d2, r = a2 - a1, b2 - b1, a1 - b1
    a, e, f = float(d1 @ d1), float(d2 @ d2), float(d2 @ r)
    if a == 0 and e == 0:
        return a1, b1
    if a == 0:
        s, t = 0.0, np.clip(f / e, 0.0, 1.0)
    else:
        c = float(d1 @ r)
        if e == 0:
            t, s = 0.0, np.clip(-c / a, 0.0, 1.0)
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom != 0 else 0.0
            t = (b * s + f) / e
            if t < 0:
                t, s = 0.0, np.clip(-c / a, 0.0, 1.0)
            elif t > 1:
                t, s = 1.0, np.clip((b - c) / a, 0.0, 1.0)
    return a1 + s * d1, b1 + t * d2


def compute_arc_vertex(la: LineSegment, lb: LineSegment, plane: ReferencePlane) -> World3:
    """Vertex of the angle between two lines.

    The intersection of the two infinite lines in plane coordinates;
    when they are within ``PARALLEL_VERTEX_TOL_DEG`` of parallel, the
    midpoint of the segments' closest-point pair.
    """
    a1 = plane_coords(plane, la.p1.world).as_array()
    a2 = plane_coords(plane, la.p2.world).as_array()
    b1 = plane_coords(plane, lb.p1.world).as_array()
    b2 = plane_coords(plane, lb.p2.world).as_array()
    da, db = a2 - a1, b2 - b1
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na == 0 or nb == 0:
        raise DegenerateGeometryError("angle over a zero-length line")
    cross = float(da[0] * db[1] - da[1] * db[0]) / (na * nb)
    if abs(cross) < math.sin(math.radians(PARALLEL_VERTEX_TOL_DEG)):
        p, q = _closest_points_on_segments(a1, a2, b1, b2)
        mid = (p + q) / 2.0
        return world_of(plane, Plane2(float(mid[0]), float(mid[1])))
    # a1 + s*da = b1 + t*db
    rhs = b1 - a1
    s = (rhs[0] * db[1] - rhs[1] * db[0]) / (da[0] * db[1] - da[1] * db[0])
    hit = a1 + s * da
    return world_of(plane, Plane2(float(hit[0]), float(hit[1])))


def _direction_from_vertex(line: LineSegment, vertex: np.ndarray, plane: ReferencePlane) -> np.ndarray:
    a = plane_coords(plane, line.p1.world).as_array()
    b = plane_coords(plane, line.p2.world).as_array()
    near, far = (a, b) if np.linalg.norm(a - vertex) <= np.linalg.norm(b - vertex) else (b, a)
    d = far - near
    n = np.linalg.norm(d)
    if n == 0:
        raise DegenerateGeometryError(f"line {line.id} has zero length")
    return d / n


def measure_angle(arc: AngleArc, lines: dict, plane: ReferencePlane) -> float:
    """Unsigned angle in degrees, [0, 180], between the two lines at the vertex."""
    la, lb = lines[arc.line_a], lines[arc.line_b]
    vertex = plane_coords(plane, arc.vertex).as_array()
    da = _direction_from_vertex(la, vertex, plane)
    db = _direction_from_vertex(lb, vertex, plane)
    return math.degrees(math.acos(max(-1.0, min(1.0, float(da @ db)))))


def line_angle_vs_reference(line: LineSegment, ref: LineSegment, plane: ReferencePlane) -> float:
    """Unsigned angle in degrees between a line and a reference line."""
    da = _line_direction_2d(line, plane)
    db = _line_direction_2d(ref, plane)
    return math.degrees(math.acos(max(-1.0, min(1.0, abs(float(da @ db))))))


def area_vertices(area: AreaPolygon, lines: dict) -> list:
    """One world vertex per boundary junction, in traversal order."""
    loop = [lines[i] for i in area.boundary]
    verts = []
    n = len(loop)
    for i in range(n):
        cur, nxt = loop[i], loop[(i + 1) % n]
        best = None
        for e in cur.endpoints():
            for f in nxt.endpoints():
                d = float(np.linalg.norm(e.world.as_array() - f.world.as_array()))
                if best is None or d < best[0]:
                    best = (d, e)
        verts.append(best[1].world)
    return verts


def shoelace_area(points2: np.ndarray) -> float:
    x, y = points2[:, 0], points2[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def measure_area(area: AreaPolygon, lines: dict, plane: ReferencePlane) -> float:
    """Absolute shoelace area, m^2, over the loop's plane coordinates."""
    verts = area_vertices(area, lines)
    coords = np.array([plane_coords(plane, v).as_array() for v in verts])
    return shoelace_area(coords)


# --- annotation lines ---

def make_annotation_line(line_id: str, stroke: Stroke, entity, camera,
                         plane: ReferencePlane) -> LineSegment:
    """A line rigidly translating with its anchor entity.

    The free end keeps its creation-time world offset from the entity,
    so the whole line follows the object without changing shape.
    """
    snap = snap_radius_px(camera.width, camera.height)
    if entity.screen_pos is None or entity.world_pos is None:
        raise NoAnchorError(f"entity {entity.id} has no position yet")
    ent_xy = entity.screen_pos.as_array()
    d0 = float(np.linalg.norm(stroke.points[0].as_array() - ent_xy))
    d1 = float(np.linalg.norm(stroke.points[-1].as_array() - ent_xy))
    if min(d0, d1) > snap:
        raise NoAnchorError("annotation stroke does not touch the entity")
    free_screen = stroke.points[-1] if d0 <= d1 else stroke.points[0]
    free_world = ray_cast_to_plane(camera, plane, free_screen)
    offset = free_world.as_array() - entity.world_pos.as_array()
    return LineSegment(
        id=line_id,
        p1=Endpoint.attached(entity.id, entity.world_pos),
        p2=Endpoint.fixed(free_world),
        kind="annotation",
        annotation_offset=offset,
        annotation_anchor=entity.id,
    )


def update_annotation_line(line: LineSegment, anchor_world: World3):
    line.p1.world = anchor_world
    line.p2.world = World3.from_array(anchor_world.as_array() + line.annotation_offset)


# --- constraints and binding applications ---

def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


def apply_perpendicular_constraint(line: LineSegment, ref: LineSegment,
                                   plane: ReferencePlane):
    """Re-project ``line`` to be orthogonal to ``ref``.

    The anchor (the attached endpoint, else p1) stays put; the other
    endpoint moves to the foot of the orthogonal through the anchor on
    the reference line, so the length equals the anchor's distance from
    the reference along the constrained direction.
    """
    if line.p1.kind == "attached" and line.p2.kind == "attached":
        return
    anchor, moving = (line.p1, line.p2)
    if line.p2.kind == "attached":
        anchor, moving = line.p2, line.p1
    ref_dir = _line_direction_2d(ref, plane)
    normal = _perp(ref_dir)
    a = plane_coords(plane, anchor.world).as_array()
    r1 = plane_coords(plane, ref.p1.world).as_array()
    t = float((r1 - a) @ normal)
    foot = a + t * normal
    moving.world = world_of(plane, Plane2(float(foot[0]), float(foot[1])))
    if moving.kind == "fixed":
        moving.kind = "derived"
        moving.binding_key = f"perpendicular:{ref.id}"


def _movable_endpoint(line: LineSegment):
    if line.p2.kind != "attached":
        anchor, moving = line.p1, line.p2
    elif line.p1.kind != "attached":
        anchor, moving = line.p2, line.p1
    else:
        raise DegenerateGeometryError(f"both endpoints of {line.id} are attached")
    return anchor, moving


def set_line_length(line: LineSegment, value: float, binding_key: str):
    """Move the non-anchored endpoint along the line so |p2-p1| = value."""
    if value < 0:
        raise DomainError(f"negative length {value}")
    anchor, moving = _movable_endpoint(line)
    d = moving.world.as_array() - anchor.world.as_array()
    n = np.linalg.norm(d)
    if n == 0:
        raise DegenerateGeometryError(f"line {line.id} has zero length")
    moving.world = World3.from_array(anchor.world.as_array() + d / n * value)
    if moving.kind == "fixed":
        moving.kind = "derived"
    moving.binding_key = binding_key


def _rotate_about(point: np.ndarray, pivot: np.ndarray, rad: float) -> np.ndarray:
    c, s = math.cos(rad), math.sin(rad)
    d = point - pivot
    return pivot + np.array([c * d[0] - s * d[1], s * d[0] + c * d[1]])


def _rotate_line_to_angle(rotating: LineSegment, ref: LineSegment, vertex2: np.ndarray,
                          value_deg: float, plane: ReferencePlane, binding_key: str):
    ref_dir = _direction_from_vertex(ref, vertex2, plane)
    cur_dir = _direction_from_vertex(rotating, vertex2, plane)
    signed = math.degrees(math.atan2(
        float(ref_dir[0] * cur_dir[1] - ref_dir[1] * cur_dir[0]),
        float(ref_dir @ cur_dir)))
    side = 1.0 if signed >= 0 else -1.0
    delta = math.radians(side * value_deg - signed)
    for endpoint in rotating.endpoints():
        if endpoint.kind == "attached":
            continue
        p = plane_coords(plane, endpoint.world).as_array()
        q = _rotate_about(p, vertex2, delta)
        endpoint.world = world_of(plane, Plane2(float(q[0]), float(q[1])))
        if endpoint.kind == "fixed":
            endpoint.kind = "derived"
        endpoint.binding_key = binding_key


def set_arc_angle(arc: AngleArc, lines: dict, value: float,
                  plane: ReferencePlane, binding_key: str):
    """Rigidly rotate the arc's free line about the vertex to the target angle.

    The line staying put is the one carrying an attached endpoint (the
    tracked side); with two free lines the second one rotates. The
    rotated line keeps its length and its side of the reference line.
    """
    la, lb = lines[arc.line_a], lines[arc.line_b]
    a_attached = any(p.kind == "attached" for p in la.endpoints())
    b_attached = any(p.kind == "attached" for p in lb.endpoints())
    if a_attached and b_attached:
        raise DegenerateGeometryError("both angle lines are tracked; nothing can rotate")
    ref, rotating = (la, lb) if not b_attached else (lb, la)
    vertex2 = plane_coords(plane, arc.vertex).as_array()
    _rotate_line_to_angle(rotating, ref, vertex2, value, plane, binding_key)


def set_line_angle(line: LineSegment, ref: LineSegment, value: float,
                   plane: ReferencePlane, binding_key: str):
    """Rotate ``line`` (about its endpoint nearest the reference) to the angle."""
    best = None
    for endpoint in line.endpoints():
        p = endpoint.world.as_array()
        d = min(np.linalg.norm(p - ref.p1.world.as_array()),
                np.linalg.norm(p - ref.p2.world.as_array()))
        if best is None or d < best[0]:
            best = (d, endpoint)
    pivot2 = plane_coords(plane, best[1].world).as_array()
    _rotate_line_to_angle(line, ref, pivot2, value, plane, binding_key)


def set_area(area: AreaPolygon, lines: dict, value: float,
             plane: ReferencePlane, binding_key: str):
    """Uniformly scale the loop about its vertex centroid to the target area."""
    if value < 0:
        raise DomainError(f"negative area {value}")
    loop = [lines[i] for i in area.boundary]
    for line in loop:
        if any(p.kind == "attached" for p in line.endpoints()):
            raise DegenerateGeometryError("cannot scale an area with tracked vertices")
    current = measure_area(area, lines, plane)
    if current == 0:
        raise DegenerateGeometryError("cannot scale a degenerate area")
    factor = math.sqrt(value / current)
    verts = np.array([plane_coords(plane, v).as_array()
                      for v in area_vertices(area, lines)])
    center = verts.mean(axis=0)
    seen = set()
    for line in loop:
        if line.id in seen:
            continue
        seen.add(line.id)
        for endpoint in line.endpoints():
            p = plane_coords(plane, endpoint.world).as_array()
            q = center + factor * (p - center)
            endpoint.world = world_of(plane, Plane2(float(q[0]), float(q[1])))
            if endpoint.kind == "fixed":
                endpoint.kind = "derived"
            endpoint.binding_key = binding_key
