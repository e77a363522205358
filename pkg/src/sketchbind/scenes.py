"""Synthetic scene generators with analytic ground truth.

Each generator renders solid-color markers moving along a closed-form
trajectory on the reference plane, writes a scene container, the
trajectory as ``truth.csv``, and a companion command script
(``script.json``) that sketches the corresponding measurement setup.

All scenes share one staging: the plane is z=0 with basisU = +x and
basisV = +y, and a static camera looks straight down from
``(0, 0, elevation)``, so a world point (x, y, 0) appears at
``u = cx + fx*x/elevation``, ``v = cy - fy*y/elevation``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import BadParamsError
from .geometry import CameraState, ReferencePlane, World3
from .scene_io import SceneWriter, write_csv
from .sketch import snap_radius_px

WHITE = (255, 255, 255)
RED = (255, 0, 0)
BLUE = (90, 140, 255)

DEFAULT_FX = 600.0
DEFAULT_ELEVATION = 1.5


def ground_plane() -> ReferencePlane:
    return ReferencePlane(World3(0, 0, 0), World3(0, 0, 1),
                          World3(1, 0, 0), World3(0, 1, 0))


def overhead_camera(width: int, height: int, fx: float = DEFAULT_FX,
                    elevation: float = DEFAULT_ELEVATION) -> CameraState:
    # 180 degrees about camera x: optical axis straight down, +y world up-screen
    return CameraState(World3(0.0, 0.0, elevation), (0.0, 1.0, 0.0, 0.0),
                       fx, fx, width / 2.0, height / 2.0, width, height)


class _Stage:
    """Shared scene staging: camera, plane, and plane<->screen mapping."""

    def __init__(self, out, fps, duration, width, height,
                 fx=None, elevation=DEFAULT_ELEVATION):
        if fx is None:
            fx = DEFAULT_FX * width / 640.0  # keep framing across resolutions
        if fps <= 0:
            raise BadParamsError(f"fps must be > 0, got {fps}")
        if duration <= 0:
            raise BadParamsError(f"duration must be > 0, got {duration}")
        if width <= 0 or height <= 0:
            raise BadParamsError(f"bad resolution {width}x{height}")
        if fx <= 0 or elevation <= 0:
            raise BadParamsError("fx and elevation must be > 0")
        self.out = Path(out)
        self.fps = float(fps)
        self.frames = int(round(duration * fps))
        if self.frames < 1:
            raise BadParamsError("scene must contain at least one frame")
        self.width, self.height = int(width), int(height)
        self.fx, self.elevation = float(fx), float(elevation)
        self.camera = overhead_camera(self.width, self.height, self.fx, self.elevation)
        self.plane = ground_plane()
        self.writer = SceneWriter(self.out, self.fps, self.width, self.height,
                                  self.plane, (self.fx, self.fx,
                                               self.width / 2.0, self.height / 2.0))

    def to_screen(self, x: float, y: float):
        scale = self.fx / self.elevation
        return (self.width / 2.0 + scale * x, self.height / 2.0 - scale * y)

    def blank(self) -> np.ndarray:
        frame = np.empty((self.height, self.width, 3), dtype=np.uint8)
        frame[...] = WHITE
        return frame

    def times(self):
        return [i / self.fps for i in range(self.frames)]

    def finish(self, truth_header, truth_rows, script_commands):
        self.writer.close()
        write_csv(self.out / "truth.csv", truth_header, truth_rows)
        script = {"commands": script_commands}
        (self.out / "script.json").write_text(json.dumps(script, indent=2) + "\n")
        return self.out


def draw_disc(frame: np.ndarray, u: float, v: float, radius: float, color):
    height, width = frame.shape[:2]
    u0, u1 = max(0, int(u - radius) - 1), min(width, int(u + radius) + 2)
    v0, v1 = max(0, int(v - radius) - 1), min(height, int(v + radius) + 2)
    if u0 >= u1 or v0 >= v1:
        return
    cols, rows = np.meshgrid(np.arange(u0, u1), np.arange(v0, v1))
    mask = (cols - u) ** 2 + (rows - v) ** 2 <= radius ** 2
    frame[v0:v1, u0:u1][mask] = color


def draw_ring(frame: np.ndarray, u: float, v: float, radius: float,
              thickness: float, color):
    height, width = frame.shape[:2]
    r_out = radius + thickness / 2.0
    u0, u1 = max(0, int(u - r_out) - 1), min(width, int(u + r_out) + 2)
    v0, v1 = max(0, int(v - r_out) - 1), min(height, int(v + r_out) + 2)
    if u0 >= u1 or v0 >= v1:
        return
    cols, rows = np.meshgrid(np.arange(u0, u1), np.arange(v0, v1))
    d2 = (cols - u) ** 2 + (rows - v) ** 2
    mask = (d2 <= r_out ** 2) & (d2 >= (radius - thickness / 2.0) ** 2)
    frame[v0:v1, u0:u1][mask] = color


def _cmd(kind: str, at_frame: int = 0, **fields) -> dict:
    out = {"type": kind}
    if at_frame:
        out["atFrame"] = at_frame
    out.update(fields)
    return out


def _stroke_cmd(p_from, p_to, at_frame: int = 0) -> dict:
    # two-point strokes are enough: classification reads only the ends
    return _cmd("stroke", at_frame,
                points=[[p_from[0], p_from[1], 0.0], [p_to[0], p_to[1], 0.1]])


# --- pendulum -------------------------------------------------------------

def generate_pendulum(out, fps=20.0, duration=10.0, width=640, height=480,
                      theta0_deg=30.0, period=1.5, arm=0.35,
                      pivot=(0.0, 0.45), marker_radius=10.0):
    """Swinging bob under a fixed pivot; truth column ``angle`` is |theta(t)|."""
    if not 0 < theta0_deg < 90:
        raise BadParamsError("theta0_deg must be in (0, 90)")
    if period <= 0 or arm <= 0:
        raise BadParamsError("period and arm must be > 0")
    stage = _Stage(out, fps, duration, width, height)
    px, py = float(pivot[0]), float(pivot[1])

    truth = []
    for t in stage.times():
        theta = math.radians(theta0_deg) * math.cos(2 * math.pi * t / period)
        bx = px + arm * math.sin(theta)
        by = py - arm * math.cos(theta)
        frame = stage.blank()
        u, v = stage.to_screen(bx, by)
        draw_disc(frame, u, v, marker_radius, RED)
        stage.writer.add_frame(frame, stage.camera, t)
        truth.append([t, abs(math.degrees(theta)), bx, by])

    return stage.finish(["t", "angle", "bob_x", "bob_y"], truth,
                        pendulum_script(stage, theta0_deg, arm, (px, py)))


def pendulum_script(stage: _Stage, theta0_deg, arm, pivot) -> list:
    px, py = pivot
    theta0 = math.radians(theta0_deg)
    bob0 = (px + arm * math.sin(theta0), py - arm * math.cos(theta0))
    pivot_s = stage.to_screen(px, py)
    bob_s = stage.to_screen(*bob0)
    ref_len = arm + 0.05
    ref_end_s = stage.to_screen(px, py - ref_len)

    def lerp(a, b, f):
        return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))

    # bisector guide 15 degrees off the reference, arc strokes on line bodies
    bis_dir = (math.sin(math.radians(theta0_deg / 2)),
               -math.cos(math.radians(theta0_deg / 2)))
    bis_end_s = stage.to_screen(px + 0.3 * bis_dir[0], py + 0.3 * bis_dir[1])
    return [
        _cmd("hello", protocolVersion=1),
        _cmd("mode", mode="select"),
        _cmd("tap", u=bob_s[0], v=bob_s[1]),
        _cmd("mode", mode="sketch"),
        _stroke_cmd(pivot_s, ref_end_s),                       # line-1: reference
        _stroke_cmd((pivot_s[0] + 2.0, pivot_s[1]), bob_s),    # line-2: pivot->bob
        _stroke_cmd(lerp(pivot_s, ref_end_s, 0.5),
                    lerp(pivot_s, bob_s, 0.5)),                # arc-1 between them
        _cmd("labelEdit", target="arc-1", text="angle"),
        _stroke_cmd((pivot_s[0] + 2.0, pivot_s[1]), bis_end_s),  # line-3: bisector guide
        _stroke_cmd(lerp(pivot_s, ref_end_s, 0.5),
                    lerp(pivot_s, bis_end_s, 0.7)),            # arc-2 ref/guide
        _cmd("labelEdit", target="arc-2", text="angle / 2"),
        _cmd("mode", mode="graph"),
        _cmd("placeGraph", rect=[0.45, -0.5, 0.5, 0.3]),
        _cmd("labelEdit", target="graph-1:y", text="angle"),
        _cmd("mode", mode="record"),
    ]


# --- projectile -----------------------------------------------------------

def generate_projectile(out, fps=20.0, duration=2.0, width=640, height=480,
                        x0=-0.5, y0=0.05, vx=0.5, vy=0.55, g=0.55,
                        marker_radius=10.0):
    """Ball in free flight above a ground line at y=0; truth is (x, y)."""
    if g <= 0:
        raise BadParamsError("g must be > 0")
    stage = _Stage(out, fps, duration, width, height)

    truth = []
    for t in stage.times():
        x = x0 + vx * t
        y = max(0.0, y0 + vy * t - 0.5 * g * t * t)
        frame = stage.blank()
        u, v = stage.to_screen(x, y)
        draw_disc(frame, u, v, marker_radius, RED)
        stage.writer.add_frame(frame, stage.camera, t)
        truth.append([t, x, y])

    ball_s = stage.to_screen(x0, y0)
    ground_a = stage.to_screen(-0.7, 0.0)
    ground_b = stage.to_screen(0.7, 0.0)
    # the drop stroke ends just past the ground line, inside the snap radius
    drop_end_v = stage.to_screen(x0, 0.0)[1] + 0.7 * snap_radius_px(
        stage.width, stage.height)
    script = [
        _cmd("hello", protocolVersion=1),
        _cmd("mode", mode="select"),
        _cmd("tap", u=ball_s[0], v=ball_s[1]),
        _cmd("mode", mode="sketch"),
        _stroke_cmd(ground_a, ground_b),                       # line-1: ground
        _stroke_cmd(ball_s, (ball_s[0], drop_end_v)),          # line-2: drop line
        _cmd("labelEdit", target="line-2", text="height"),
        _cmd("mode", mode="record"),
    ]
    return stage.finish(["t", "x", "y"], truth, script)


# --- cycloid --------------------------------------------------------------

def generate_cycloid(out, fps=20.0, duration=10.0, width=640, height=480,
                     radius=0.1, speed=1.0, x0=-0.5, marker_radius=8.0):
    """Rim point of a circle rolling along y=0; the path is a cycloid."""
    if radius <= 0 or speed <= 0:
        raise BadParamsError("radius and speed must be > 0")
    stage = _Stage(out, fps, duration, width, height)
    scale = stage.fx / stage.elevation

    truth = []
    for t in stage.times():
        phi = speed * t
        x = x0 + radius * (phi - math.sin(phi))
        y = radius * (1.0 - math.cos(phi))
        cx = x0 + radius * phi
        frame = stage.blank()
        wheel_u, wheel_v = stage.to_screen(cx, radius)
        draw_ring(frame, wheel_u, wheel_v, radius * scale, 3.0, BLUE)
        u, v = stage.to_screen(x, y)
        draw_disc(frame, u, v, marker_radius, RED)
        stage.writer.add_frame(frame, stage.camera, t)
        truth.append([t, x, y])

    rim_s = stage.to_screen(x0, 0.0)
    script = [
        _cmd("hello", protocolVersion=1),
        _cmd("mode", mode="select"),
        _cmd("tap", u=rim_s[0], v=rim_s[1]),
        _cmd("mode", mode="record"),
    ]
    return stage.finish(["t", "x", "y"], truth, script)


# --- slider ---------------------------------------------------------------

def generate_slider(out, fps=20.0, duration=10.0, width=640, height=480,
                    track_y=-0.3, anchor_x=-0.4, travel=0.5, marker_radius=10.0):
    """A token sliding along a straight track; an improvised tangible slider."""
    if travel <= 0:
        raise BadParamsError("travel must be > 0")
    stage = _Stage(out, fps, duration, width, height)
    x_start = anchor_x + 0.15

    truth = []
    for t in stage.times():
        x = x_start + 0.5 * travel * (1.0 - math.cos(2 * math.pi * t / duration))
        frame = stage.blank()
        u, v = stage.to_screen(x, track_y)
        draw_disc(frame, u, v, marker_radius, RED)
        stage.writer.add_frame(frame, stage.camera, t)
        truth.append([t, x, x - anchor_x])

    token_s = stage.to_screen(x_start, track_y)
    anchor_s = stage.to_screen(anchor_x, track_y)
    script = [
        _cmd("hello", protocolVersion=1),
        _cmd("mode", mode="select"),
        _cmd("tap", u=token_s[0], v=token_s[1]),
        _cmd("mode", mode="sketch"),
        _stroke_cmd(anchor_s, token_s),                        # line-1: anchor->token
        _cmd("labelEdit", target="line-1", text="dist"),
        _cmd("labelEdit", target="channel:token-scale", text="dist * 10"),
        _cmd("labelEdit", target="channel:token-on", text="(dist > 0.3)"),
        _cmd("mode", mode="record"),
    ]
    return stage.finish(["t", "x", "dist"], truth, script)


# --- rotating point -------------------------------------------------------

def generate_rotating_point(out, fps=20.0, duration=10.0, width=640, height=480,
                            radius=0.3, period=5.0, marker_radius=10.0):
    """Point on a rotating circle; angle vs height traces a sine."""
    if radius <= 0 or period <= 0:
        raise BadParamsError("radius and period must be > 0")
    stage = _Stage(out, fps, duration, width, height)

    truth = []
    for t in stage.times():
        phi = 2 * math.pi * t / period
        x, y = radius * math.cos(phi), radius * math.sin(phi)
        frame = stage.blank()
        u, v = stage.to_screen(x, y)
        draw_disc(frame, u, v, marker_radius, RED)
        stage.writer.add_frame(frame, stage.camera, t)
        angle = math.degrees(math.acos(max(-1.0, min(1.0, math.cos(phi)))))
        truth.append([t, angle, abs(y)])

    # sketch once the point is off the reference line
    k = min(5, stage.frames - 1)
    t_k = k / stage.fps
    phi_k = 2 * math.pi * t_k / period
    point_s = stage.to_screen(radius * math.cos(phi_k), radius * math.sin(phi_k))
    ref_a, ref_b = stage.to_screen(-0.4, 0.0), stage.to_screen(0.4, 0.0)
    center_s = stage.to_screen(0.0, 0.0)

    def lerp(a, b, f):
        return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))

    mid = lerp(center_s, point_s, 0.5)
    # the height stroke ends just past the reference line, inside the snap radius
    height_end_v = center_s[1] + 0.8 * snap_radius_px(stage.width, stage.height)
    script = [
        _cmd("hello", protocolVersion=1),
        _cmd("mode", mode="select", at_frame=k),
        _cmd("tap", at_frame=k, u=point_s[0], v=point_s[1]),
        _cmd("mode", mode="sketch", at_frame=k),
        _stroke_cmd(ref_a, ref_b, at_frame=k),                 # line-1: reference
        _stroke_cmd(center_s, point_s, at_frame=k),            # line-2: radius
        _stroke_cmd((mid[0], center_s[1]), mid, at_frame=k),   # arc-1 between them
        _cmd("labelEdit", at_frame=k, target="arc-1", text="angle"),
        _stroke_cmd(point_s, (point_s[0], height_end_v), at_frame=k),  # line-3
        _cmd("labelEdit", at_frame=k, target="line-3", text="height"),
        _cmd("mode", at_frame=k, mode="graph"),
        _cmd("placeGraph", at_frame=k, rect=[0.45, -0.5, 0.5, 0.3]),
        _cmd("labelEdit", at_frame=k, target="graph-1:x", text="angle"),
        _cmd("labelEdit", at_frame=k, target="graph-1:y", text="height"),
    ]
    return stage.finish(["t", "angle", "height"], truth, script)


GENERATORS = {
    "pendulum": generate_pendulum,
    "projectile": generate_projectile,
    "cycloid": generate_cycloid,
    "slider": generate_slider,
    "rotating-point": generate_rotating_point,
}


def generate_scene(kind: str, out, **params):
    """Dispatch to a generator by kind; unknown kinds or params are BadParams."""
    gen = GENERATORS.get(kind)
    if gen is None:
        raise BadParamsError(f"unknown scene kind {kind!r}; have {sorted(GENERATORS)}")
    try:
        return gen(out, **params)
    except TypeError as exc:
        raise BadParamsError(str(exc)) from exc
