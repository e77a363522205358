import math
from types import SimpleNamespace

import numpy as np
import pytest

from sketchbind.errors import NoAnchorError, StrokeTooShortError
from sketchbind.geometry import Screen2, World3
from sketchbind.sketch import (
    AngleArc,
    AreaPolygon,
    Endpoint,
    LineSegment,
    NewAngle,
    NewArea,
    NewLine,
    Stroke,
    apply_perpendicular_constraint,
    classify_stroke,
    compute_arc_vertex,
    line_angle_vs_reference,
    make_annotation_line,
    measure_angle,
    measure_area,
    measure_length,
    set_arc_angle,
    set_line_length,
    shoelace_area,
    snap_radius_px,
    update_annotation_line,
)
from sketchbind.tracker import TrackedEntity
from support import down_camera, plane, random_convex_polygon, triangulation_area

CAM = down_camera()  # 640x480, 400 px per meter on the plane
PLANE = plane()
SCALE = 400.0


def s_of(x, y):
    """Screen position of plane point (x, y)."""
    return Screen2(320 + SCALE * x, 240 - SCALE * y)


def fixed(x, y):
    return Endpoint.fixed(World3(x, y, 0.0))


def line(line_id, a, b, kind="static"):
    return LineSegment(line_id, fixed(*a), fixed(*b), kind)


def entity(entity_id, x, y):
    return TrackedEntity(entity_id, model=None, screen_pos=s_of(x, y),
                         world_pos=World3(x, y, 0.0), found=True)


def stroke(*screen_points):
    return Stroke([p if isinstance(p, Screen2) else Screen2(*p) for p in screen_points],
                  [0.05 * i for i in range(len(screen_points))])


def state(entities=(), lines=(), mode="sketch"):
    return SimpleNamespace(entities={e.id: e for e in entities},
                           lines={l.id: l for l in lines}, mode=mode)


def test_snap_radius_is_screen_relative():
    assert snap_radius_px(640, 480) == pytest.approx(12.0)
    assert snap_radius_px(1920, 1080) == pytest.approx(27.0)


def test_stroke_near_ball_becomes_dynamic_line():
    ball = entity("ball", 0.2, 0.1)
    intent = classify_stroke(stroke(s_of(0.2, 0.1), s_of(-0.3, -0.2)),
                             state([ball]), CAM, PLANE)
    assert isinstance(intent, NewLine)
    assert intent.kind == "dynamic"
    assert intent.p1.kind == "attached" and intent.p1.entity_id == "ball"
    assert intent.p2.kind == "fixed"


def test_stroke_in_free_space_is_static_line():
    intent = classify_stroke(stroke(s_of(-0.2, 0.0), s_of(0.2, 0.1)),
                             state(), CAM, PLANE)
    assert isinstance(intent, NewLine)
    assert intent.kind == "static"
    assert intent.p1.kind == intent.p2.kind == "fixed"
    # free endpoints unproject onto the plane
    assert intent.p1.world.z == pytest.approx(0.0, abs=1e-12)
    assert intent.p1.world.x == pytest.approx(-0.2, abs=1e-9)


def test_stroke_between_two_lines_is_angle():
    la = line("line-1", (0.0, 0.45), (0.0, 0.05))
    lb = line("line-2", (0.0, 0.45), (0.3, 0.1))
    intent = classify_stroke(stroke(s_of(0.0, 0.25), s_of(0.15, 0.275)),
                             state(lines=[la, lb]), CAM, PLANE)
    assert isinstance(intent, NewAngle)
    assert {intent.line_a, intent.line_b} == {"line-1", "line-2"}
    # vertex at the shared junction
    assert intent.vertex.x == pytest.approx(0.0, abs=1e-9)
    assert intent.vertex.y == pytest.approx(0.45, abs=1e-9)


def test_closing_a_two_line_chain_makes_an_area():
    la = line("line-1", (0.0, 0.0), (0.4, 0.0))
    lb = line("line-2", (0.4, 0.0), (0.4, 0.3))
    intent = classify_stroke(stroke(s_of(0.4, 0.3), s_of(0.0, 0.0)),
                             state(lines=[la, lb]), CAM, PLANE)
    assert isinstance(intent, NewArea)
    assert intent.chain in (["line-1", "line-2"], ["line-2", "line-1"])
    # the closing endpoints snap to the chain's open ends
    got = sorted([(intent.closing_p1.world.x, intent.closing_p1.world.y),
                  (intent.closing_p2.world.x, intent.closing_p2.world.y)])
    assert got[0] == pytest.approx((0.0, 0.0), abs=1e-9)
    assert got[1] == pytest.approx((0.4, 0.3), abs=1e-9)


def test_short_stroke_rejected():
    with pytest.raises(StrokeTooShortError):
        classify_stroke(stroke((320, 240), (324, 240)), state(), CAM, PLANE)


def test_classification_is_deterministic():
    la = line("line-1", (0.0, 0.45), (0.0, 0.05))
    lb = line("line-2", (0.0, 0.45), (0.3, 0.1))
    st = stroke(s_of(0.0, 0.25), s_of(0.15, 0.275))
    first = classify_stroke(st, state(lines=[la, lb]), CAM, PLANE)
    second = classify_stroke(st, state(lines=[la, lb]), CAM, PLANE)
    assert first == second


def test_near_perpendicular_line_gets_constraint():
    ground = line("line-1", (-0.5, 0.0), (0.5, 0.0))
    ball = entity("ball", 0.1, 0.4)
    # stroke from the ball down to just above the ground line, 4 deg off vertical
    end = s_of(0.1 + 0.4 * math.tan(math.radians(4.0)), 0.02)
    intent = classify_stroke(stroke(s_of(0.1, 0.4), end),
                             state([ball], [ground]), CAM, PLANE)
    assert isinstance(intent, NewLine)
    assert intent.perpendicular_to == "line-1"


def test_oblique_line_gets_no_constraint():
    ground = line("line-1", (-0.5, 0.0), (0.5, 0.0))
    intent = classify_stroke(stroke(s_of(-0.2, 0.3), s_of(0.2, 0.01)),
                             state(lines=[ground]), CAM, PLANE)
    assert isinstance(intent, NewLine)
    assert intent.perpendicular_to is None


# --- measurement ---

def test_unit_line_length():
    assert measure_length(line("l", (0.0, 0.0), (1.0, 0.0))) == pytest.approx(1.0)


def test_pendulum_style_angle_is_forty_degrees():
    ref = line("line-1", (0.0, 0.45), (0.0, 0.05))
    theta = math.radians(40.0)
    bob = line("line-2", (0.0, 0.45),
               (0.35 * math.sin(theta), 0.45 - 0.35 * math.cos(theta)))
    lines = {"line-1": ref, "line-2": bob}
    arc = AngleArc("arc-1", "line-1", "line-2",
                   compute_arc_vertex(ref, bob, PLANE))
    assert measure_angle(arc, lines, PLANE) == pytest.approx(40.0, abs=1e-9)


def test_angle_invariant_under_line_rescaling():
    ref = line("line-1", (0.0, 0.0), (0.0, -1.0))
    for scale in (0.2, 1.0, 3.7):
        other = line("line-2", (0.0, 0.0),
                     (scale * math.sin(0.5), -scale * math.cos(0.5)))
        lines = {"line-1": ref, "line-2": other}
        arc = AngleArc("a", "line-1", "line-2", compute_arc_vertex(ref, other, PLANE))
        assert measure_angle(arc, lines, PLANE) == pytest.approx(
            math.degrees(0.5), abs=1e-9)


def test_right_triangle_area():
    la = line("line-1", (0.0, 0.0), (1.0, 0.0))
    lb = line("line-2", (1.0, 0.0), (0.0, 1.0))
    lc = line("line-3", (0.0, 1.0), (0.0, 0.0))
    lines = {l.id: l for l in (la, lb, lc)}
    area = AreaPolygon("area-1", ["line-1", "line-2", "line-3"])
    assert measure_area(area, lines, PLANE) == pytest.approx(0.5, abs=1e-12)


def test_shoelace_matches_triangulation_oracle():
    rng = np.random.default_rng(21)
    for _ in range(300):
        poly = random_convex_polygon(rng)
        assert abs(shoelace_area(poly) - triangulation_area(poly)) <= 1e-9


def test_shoelace_invariant_under_vertex_cycle_rotation():
    rng = np.random.default_rng(22)
    poly = random_convex_polygon(rng, n_min=5, n_max=5)
    base = shoelace_area(poly)
    for k in range(1, 5):
        assert shoelace_area(np.roll(poly, k, axis=0)) == pytest.approx(base, abs=1e-12)


def test_area_invariant_under_plane_basis_rotation():
    # the same world loop measured in a rotated plane chart has the same area
    from sketchbind.geometry import ReferencePlane

    rng = np.random.default_rng(23)
    world_loop = [(x, y) for x, y in random_convex_polygon(rng, n_min=4, n_max=8)]

    def measured(theta):
        c, s = math.cos(theta), math.sin(theta)
        rotated = ReferencePlane(World3(0, 0, 0), World3(0, 0, 1),
                                 World3(c, s, 0.0), World3(-s, c, 0.0))
        lines = {}
        n = len(world_loop)
        for i in range(n):
            a, b = world_loop[i], world_loop[(i + 1) % n]
            lines[f"line-{i + 1}"] = line(f"line-{i + 1}", a, b)
        area = AreaPolygon("area-1", sorted(lines))
        return measure_area(area, lines, rotated)

    base = measured(0.0)
    for theta in (0.3, 1.2, 2.8):
        assert measured(theta) == pytest.approx(base, abs=1e-12)


def test_stroke_between_two_tracked_objects_attaches_both_ends():
    a = entity("ball-a", -0.2, 0.1)
    b = entity("ball-b", 0.3, -0.1)
    intent = classify_stroke(stroke(s_of(-0.2, 0.1), s_of(0.3, -0.1)),
                             state([a, b]), CAM, PLANE)
    assert isinstance(intent, NewLine)
    assert intent.kind == "dynamic"
    assert intent.p1.entity_id == "ball-a"
    assert intent.p2.entity_id == "ball-b"
    # such a line measures the distance between the two objects
    seg = LineSegment("line-1", intent.p1, intent.p2, intent.kind)
    assert measure_length(seg) == pytest.approx(math.hypot(0.5, 0.2), abs=1e-9)


# --- annotation lines ---

def test_annotation_keeps_creation_offset():
    ball = entity("ball", 0.0, 0.0)
    ann = make_annotation_line("line-9", stroke(s_of(0.0, 0.0), s_of(0.0, -0.1)),
                               ball, CAM, PLANE)
    assert ann.kind == "annotation"
    offset = ann.annotation_offset
    assert offset[1] == pytest.approx(-0.1, abs=1e-9)
    # entity moves +0.3 in x: the free end rigidly follows
    update_annotation_line(ann, World3(0.3, 0.0, 0.0))
    assert ann.p2.world.x == pytest.approx(0.3, abs=1e-9)
    assert ann.p2.world.y == pytest.approx(-0.1, abs=1e-9)
    # stationary entity: endpoints constant
    before = (ann.p1.world, ann.p2.world)
    update_annotation_line(ann, World3(0.3, 0.0, 0.0))
    assert (ann.p1.world, ann.p2.world) == before


def test_annotation_path_follows_entity_path_pointwise():
    ball = entity("ball", 0.0, 0.0)
    ann = make_annotation_line("line-9", stroke(s_of(0.0, 0.0), s_of(0.05, -0.1)),
                               ball, CAM, PLANE)
    offset = ann.annotation_offset.copy()
    rng = np.random.default_rng(17)
    for _ in range(50):
        p = World3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0)
        update_annotation_line(ann, p)
        assert np.allclose(ann.p2.world.as_array(), p.as_array() + offset, atol=1e-12)


def test_annotation_requires_anchor():
    ball = entity("ball", 0.4, 0.4)
    with pytest.raises(NoAnchorError):
        make_annotation_line("line-9", stroke(s_of(0.0, 0.0), s_of(0.0, -0.1)),
                             ball, CAM, PLANE)


def test_annotation_mode_classification():
    ball = entity("ball", 0.1, 0.1)
    intent = classify_stroke(stroke(s_of(0.1, 0.1), s_of(0.2, 0.3)),
                             state([ball], mode="annotation"), CAM, PLANE)
    assert intent.entity_id == "ball"


# --- perpendicular constraint ---

def _constrained_drop_line(ball_pos):
    ground = line("ground", (-0.5, 0.0), (0.5, 0.0))
    drop = LineSegment("drop", Endpoint.attached("ball", ball_pos),
                       fixed(ball_pos.x + 0.01, 0.0), "dynamic",
                       perpendicular_to="ground")
    return ground, drop


def test_perpendicular_length_is_height():
    ground, drop = _constrained_drop_line(World3(0.1, 0.5, 0.0))
    apply_perpendicular_constraint(drop, ground, PLANE)
    assert measure_length(drop) == pytest.approx(0.5, abs=1e-12)
    assert drop.p2.world.x == pytest.approx(0.1, abs=1e-12)
    assert drop.p2.world.y == pytest.approx(0.0, abs=1e-12)


def test_perpendicular_length_constant_for_parallel_motion():
    ground, drop = _constrained_drop_line(World3(-0.3, 0.25, 0.0))
    apply_perpendicular_constraint(drop, ground, PLANE)
    first = measure_length(drop)
    drop.p1.world = World3(0.4, 0.25, 0.0)  # entity moved parallel to ground
    apply_perpendicular_constraint(drop, ground, PLANE)
    assert measure_length(drop) == pytest.approx(first, abs=1e-12)


# --- binding applications ---

def test_set_line_length_moves_free_endpoint_exactly():
    seg = LineSegment("l", Endpoint.attached("e", World3(0, 0, 0)),
                      fixed(0.3, 0.4), "dynamic")
    set_line_length(seg, 1.0, "b")
    assert measure_length(seg) == pytest.approx(1.0, abs=1e-12)
    # direction preserved
    assert seg.p2.world.x == pytest.approx(0.6, abs=1e-12)
    assert seg.p2.world.y == pytest.approx(0.8, abs=1e-12)
    assert seg.p2.kind == "derived"


def test_set_arc_angle_rotates_to_exact_angle():
    ref = line("line-1", (0.0, 0.0), (0.0, -0.4))
    free = line("line-2", (0.0, 0.0), (0.3 * math.sin(0.6), -0.3 * math.cos(0.6)))
    lines = {"line-1": ref, "line-2": free}
    arc = AngleArc("arc-1", "line-1", "line-2", compute_arc_vertex(ref, free, PLANE))
    length_before = measure_length(free)
    set_arc_angle(arc, lines, 20.0, PLANE, "b")
    assert measure_angle(arc, lines, PLANE) == pytest.approx(20.0, abs=1e-9)
    assert measure_length(free) == pytest.approx(length_before, abs=1e-12)
    # reference line untouched
    assert ref.p2.world.y == pytest.approx(-0.4, abs=1e-15)


def test_set_arc_angle_preserves_side():
    ref = line("line-1", (0.0, 0.0), (0.4, 0.0))
    left = line("line-2", (0.0, 0.0), (0.2 * math.cos(2.0), 0.2 * math.sin(2.0)))
    lines = {"line-1": ref, "line-2": left}
    arc = AngleArc("arc-1", "line-1", "line-2", compute_arc_vertex(ref, left, PLANE))
    set_arc_angle(arc, lines, 45.0, PLANE, "b")
    # stayed on the +y side
    assert left.p2.world.y > 0
    assert measure_angle(arc, lines, PLANE) == pytest.approx(45.0, abs=1e-9)


def test_line_angle_vs_reference():
    ref = line("line-1", (0.0, 0.0), (1.0, 0.0))
    other = line("line-2", (0.0, 0.0), (math.cos(0.7), math.sin(0.7)))
    assert line_angle_vs_reference(other, ref, PLANE) == pytest.approx(
        math.degrees(0.7), abs=1e-9)
