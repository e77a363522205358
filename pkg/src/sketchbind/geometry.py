"""Camera model, reference plane, and coordinate conversions.

Coordinate conventions used throughout the package:

  World frame (right-handed, meters):
    - arbitrary origin supplied by the scene
    - all sketch geometry and tracked positions live here

  Camera frame (right-handed, standard computer vision):
    - X right, Y down, Z forward along the optical axis
    - ``CameraState.orientation`` is a unit quaternion ``(w, x, y, z)``
      rotating camera-frame vectors into the world frame

  Screen frame (pixels):
    - origin top-left, u right, v down
    - pixel centers sit at integer coordinates, so the pixel at
      row ``i``, column ``j`` is the point ``(u=j, v=i)``

All functions here are pure and operate on immutable values; they are
safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, NoIntersectionError

QUAT_NORM_TOL = 1e-9
ORTHO_TOL = 1e-9
PARALLEL_RAY_TOL = 1e-9


@dataclass(frozen=True)
class World3:
    """A point (or vector) in the world frame, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError("world coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a) -> "World3":
        return World3(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class Screen2:
    """A point in screen pixels; may lie outside the frame bounds."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("screen coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=float)


@dataclass(frozen=True)
class Plane2:
    """2D chart coordinates on the reference plane, meters along (basisU, basisV)."""

    a: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=float)


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix for a unit quaternion ``(w, x, y, z)``.

    The returned matrix rotates camera-frame vectors into the world
    frame (its columns are the camera axes expressed in world
    coordinates).
    """
    w, x, y, z = (float(c) for c in q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def matrix_to_quat(rot: np.ndarray):
    """Unit quaternion ``(w, x, y, z)`` for a rotation matrix (w >= 0)."""
    m = np.asarray(rot, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0:
        s = math.sqrt(tr + 1.0) * 2
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    q = np.array([w, x, y, z])
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return tuple(float(c) for c in q)


@dataclass(frozen=True)
class CameraState:
    """Pinhole camera pose and intrinsics for one frame.

    Args:
        position: optical center in world coordinates.
        orientation: unit quaternion ``(w, x, y, z)``, camera -> world.
        fx, fy: focal lengths in pixels (> 0).
        cx, cy: principal point in pixels.
        width, height: frame resolution in pixels.
    """

    position: World3
    orientation: tuple
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        n = math.sqrt(sum(float(c) ** 2 for c in self.orientation))
        if abs(n - 1.0) > QUAT_NORM_TOL:
            raise ValueError(f"orientation quaternion norm {n} != 1")
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")

    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)


@dataclass(frozen=True)
class ReferencePlane:
    """The surface sketches and tracked objects live on.

    ``basisU`` and ``basisV`` span the plane and form a right-handed
    triad with ``normal`` (basisU x basisV = normal).
    """

    origin: World3
    normal: World3
    basis_u: World3
    basis_v: World3

    def __post_init__(self):
        n, u, v = self.normal.as_array(), self.basis_u.as_array(), self.basis_v.as_array()
        for name, vec in (("normal", n), ("basisU", u), ("basisV", v)):
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a unit vector")
        if abs(u @ v) >= ORTHO_TOL or abs(u @ n) >= ORTHO_TOL or abs(v @ n) >= ORTHO_TOL:
            raise ValueError("plane basis vectors must be pairwise orthogonal")
        if np.linalg.norm(np.cross(u, v) - n) > 1e-9:
            raise ValueError("plane basis must be right-handed (basisU x basisV = normal)")


def ray_cast_to_plane(camera: CameraState, plane: ReferencePlane, pt: Screen2) -> World3:
    """Unproject a screen point onto the reference plane.

    The view ray starts at the camera center and passes through the
    pixel; the result is its first intersection with the plane.

    Raises:
        NoIntersectionError: ray is parallel to the plane (|dir . n| below
            ``PARALLEL_RAY_TOL``) or the intersection lies behind the camera.
    """
    rot = camera.rotation()
    d_cam = np.array([(pt.u - camera.cx) / camera.fx, (pt.v - camera.cy) / camera.fy, 1.0])
    d_world = rot @ d_cam
    d_world /= np.linalg.norm(d_world)
    n = plane.normal.as_array()
    denom = float(d_world @ n)
    if abs(denom) < PARALLEL_RAY_TOL:
        raise NoIntersectionError("view ray is parallel to the plane")
    t = float((plane.origin.as_array() - camera.position.as_array()) @ n) / denom
    if t <= 0:
        raise NoIntersectionError("plane is behind the camera")
    return World3.from_array(camera.position.as_array() + t * d_world)


def project_to_screen(camera: CameraState, p: World3) -> Screen2:
    """Project a world point through the pinhole model.

    Raises:
        BehindCameraError: the point has depth <= 0 in the camera frame.
    """
    rot = camera.rotation()
    p_cam = rot.T @ (p.as_array() - camera.position.as_array())
    z = p_cam[2]
    if z <= 0:
        raise BehindCameraError(f"point depth {z} <= 0")
    return Screen2(camera.fx * p_cam[0] / z + camera.cx, camera.fy * p_cam[1] / z + camera.cy)


def plane_coords(plane: ReferencePlane, p: World3) -> Plane2:
    """Chart coordinates of (the orthogonal projection of) ``p`` on the plane."""
    d = p.as_array() - plane.origin.as_array()
    return Plane2(float(d @ plane.basis_u.as_array()), float(d @ plane.basis_v.as_array()))


def world_of(plane: ReferencePlane, p: Plane2) -> World3:
    """Inverse of :func:`plane_coords`; the result lies exactly on the plane."""
    out = (plane.origin.as_array()
           + p.a * plane.basis_u.as_array()
           + p.b * plane.basis_v.as_array())
    return World3.from_array(out)
