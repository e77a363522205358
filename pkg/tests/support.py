"""Shared helpers for the test suite: tiny scenes, random poses, oracles."""

from __future__ import annotations

import math

import numpy as np

from sketchbind.geometry import (
    CameraState,
    ReferencePlane,
    World3,
    matrix_to_quat,
)
from sketchbind.scene_io import SceneWriter, load_scene
from sketchbind.scenes import draw_disc, ground_plane, overhead_camera


def down_camera(width=640, height=480, fx=600.0, elevation=1.5) -> CameraState:
    return overhead_camera(width, height, fx, elevation)


def plane() -> ReferencePlane:
    return ground_plane()


def look_at_camera(position, target, rng, width=640, height=480) -> CameraState:
    """A valid camera at ``position`` looking at ``target`` with random roll."""
    pos = np.asarray(position, dtype=float)
    z_cam = np.asarray(target, dtype=float) - pos
    z_cam /= np.linalg.norm(z_cam)
    while True:
        up = rng.normal(size=3)
        x_cam = np.cross(up, z_cam)
        n = np.linalg.norm(x_cam)
        if n > 1e-3:
            break
    x_cam /= n
    y_cam = np.cross(z_cam, x_cam)
    rot = np.column_stack([x_cam, y_cam, z_cam])
    fx = rng.uniform(300, 900)
    fy = rng.uniform(300, 900)
    return CameraState(World3.from_array(pos), matrix_to_quat(rot),
                       fx, fy, width / 2, height / 2, width, height)


def random_pose_above_plane(rng, width=640, height=480) -> CameraState:
    pos = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 3.0)])
    target = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0])
    return look_at_camera(pos, target, rng, width, height)


def write_disc_scene(root, centers, fps=20.0, width=160, height=120,
                     radius=8.0, color=(255, 0, 0), fx=150.0, elevation=1.5,
                     extra_draw=None, points=None):
    """A small scene with one red disc per frame at the given screen centers.

    ``centers[i]`` may be None to hide the disc (occlusion frames).
    Returns the loaded SceneRecording.
    """
    camera = down_camera(width, height, fx, elevation)
    writer = SceneWriter(root, fps, width, height, plane(),
                         (fx, fx, width / 2, height / 2))
    for i, center in enumerate(centers):
        frame = np.full((height, width, 3), 255, dtype=np.uint8)
        if extra_draw is not None:
            extra_draw(frame, i)
        if center is not None:
            draw_disc(frame, center[0], center[1], radius, color)
        writer.add_frame(frame, camera, i / fps)
        if points and i in points:
            writer.add_points(i, points[i])
    writer.close()
    return load_scene(root)


def screen_of(x, y, width=160, height=120, fx=150.0, elevation=1.5):
    """Screen position of plane point (x, y, 0) under the overhead staging."""
    scale = fx / elevation
    return (width / 2 + scale * x, height / 2 - scale * y)


def world_of_screen(u, v, width=160, height=120, fx=150.0, elevation=1.5):
    scale = fx / elevation
    return ((u - width / 2) / scale, (height / 2 - v) / scale)


def triangulation_area(points2: np.ndarray) -> float:
    """Independent polygon-area oracle: fan triangulation from vertex 0."""
    total = 0.0
    p0 = points2[0]
    for i in range(1, len(points2) - 1):
        a = points2[i] - p0
        b = points2[i + 1] - p0
        total += 0.5 * (a[0] * b[1] - a[1] * b[0])
    return abs(total)


def random_convex_polygon(rng, n_min=3, n_max=10) -> np.ndarray:
    """Random convex polygon: sorted angles on a randomized ellipse."""
    n = rng.integers(n_min, n_max + 1)
    angles = np.sort(rng.uniform(0, 2 * math.pi, size=n))
    radius = rng.uniform(0.2, 2.0)
    stretch = rng.uniform(0.5, 2.0)
    cx, cy = rng.uniform(-1, 1, size=2)
    return np.column_stack([cx + radius * np.cos(angles),
                            cy + stretch * radius * np.sin(angles)])


def greedy_spacing_oracle(positions, min_spacing) -> int:
    """Independent re-implementation of the strobe spacing rule."""
    count = 0
    last = None
    for pos in positions:
        p = np.asarray(pos, dtype=float)
        if last is None or min_spacing == 0 or np.linalg.norm(p - last) >= min_spacing:
            count += 1
            last = p
    return count
