import math

import numpy as np
import pytest

from sketchbind.errors import BehindCameraError, NoIntersectionError
from sketchbind.geometry import (
    CameraState,
    Plane2,
    ReferencePlane,
    Screen2,
    World3,
    matrix_to_quat,
    plane_coords,
    project_to_screen,
    quat_to_matrix,
    ray_cast_to_plane,
    world_of,
)
from support import down_camera, plane, random_pose_above_plane


def test_tap_at_principal_point_straight_down_hits_origin():
    cam = down_camera()
    hit = ray_cast_to_plane(cam, plane(), Screen2(320, 240))
    assert abs(hit.x) < 1e-12 and abs(hit.y) < 1e-12 and abs(hit.z) < 1e-12


def test_point_on_optical_axis_projects_to_principal_point():
    cam = down_camera()
    s = project_to_screen(cam, World3(0, 0, 0))
    assert s.u == pytest.approx(320, abs=1e-9)
    assert s.v == pytest.approx(240, abs=1e-9)


def test_round_trip_random_poses():
    rng = np.random.default_rng(7)
    pl = plane()
    for _ in range(300):
        cam = random_pose_above_plane(rng)
        pt = Screen2(rng.uniform(0, cam.width), rng.uniform(0, cam.height))
        try:
            hit = ray_cast_to_plane(cam, pl, pt)
        except NoIntersectionError:
            continue  # ray may miss forward half-space for oblique poses
        back = project_to_screen(cam, hit)
        assert math.hypot(back.u - pt.u, back.v - pt.v) < 1e-6
        # the hit lies on the plane
        d = hit.as_array() - pl.origin.as_array()
        assert abs(float(d @ pl.normal.as_array())) <= 1e-9


def test_parallel_ray_raises():
    # camera at z=1 looking along +x: the principal ray runs parallel to z=0
    # (columns are the camera axes expressed in world coordinates)
    rot = np.column_stack([np.array([0.0, 1.0, 0.0]),
                           np.array([0.0, 0.0, -1.0]),
                           np.array([1.0, 0.0, 0.0])])
    cam = CameraState(World3(0, 0, 1.0), matrix_to_quat(rot),
                      600, 600, 320, 240, 640, 480)
    with pytest.raises(NoIntersectionError):
        ray_cast_to_plane(cam, plane(), Screen2(320, 240))


def test_plane_behind_camera_raises():
    # looking straight up from above the plane
    rot = np.column_stack([np.array([1.0, 0.0, 0.0]),
                           np.array([0.0, 1.0, 0.0]),
                           np.array([0.0, 0.0, 1.0])])
    cam = CameraState(World3(0, 0, 1.0), matrix_to_quat(rot),
                      600, 600, 320, 240, 640, 480)
    with pytest.raises(NoIntersectionError):
        ray_cast_to_plane(cam, plane(), Screen2(320, 240))


def test_point_behind_camera_raises():
    cam = down_camera()  # looks down from z=1.5
    with pytest.raises(BehindCameraError):
        project_to_screen(cam, World3(0, 0, 3.0))


def test_plane_coords_origin_and_basis():
    pl = plane()
    assert plane_coords(pl, pl.origin) == Plane2(0.0, 0.0)
    u = World3(1.0, 0.0, 0.0)
    assert plane_coords(pl, u).a == pytest.approx(1.0, abs=1e-15)
    assert plane_coords(pl, u).b == pytest.approx(0.0, abs=1e-15)


def test_plane_coords_round_trip_random():
    rng = np.random.default_rng(3)
    # a tilted plane with an orthonormal right-handed basis
    n = np.array([1.0, 2.0, 2.0]) / 3.0
    u = np.array([2.0, -2.0, 1.0]) / 3.0
    v = np.cross(n, u)
    pl = ReferencePlane(World3(0.3, -0.2, 0.5), World3.from_array(n),
                        World3.from_array(u), World3.from_array(v))
    for _ in range(200):
        p = World3.from_array(rng.uniform(-5, 5, size=3))
        c = plane_coords(pl, p)
        w = world_of(pl, c)
        # round trip equals the orthogonal projection of p onto the plane
        d = p.as_array() - pl.origin.as_array()
        proj = pl.origin.as_array() + (d @ u) * u + (d @ v) * v
        assert np.linalg.norm(w.as_array() - proj) <= 1e-9
        # and world_of output itself lies on the plane
        assert abs((w.as_array() - pl.origin.as_array()) @ n) <= 1e-9


def test_quaternion_matrix_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(100):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        if q[0] < 0:
            q = -q
        rot = quat_to_matrix(q)
        assert np.allclose(rot @ rot.T, np.eye(3), atol=1e-12)
        q2 = matrix_to_quat(rot)
        assert np.allclose(q, q2, atol=1e-9)


def test_camera_invariants_enforced():
    with pytest.raises(ValueError):
        CameraState(World3(0, 0, 1), (1.0, 0.1, 0.0, 0.0), 600, 600, 320, 240, 640, 480)
    with pytest.raises(ValueError):
        CameraState(World3(0, 0, 1), (1.0, 0.0, 0.0, 0.0), -5, 600, 320, 240, 640, 480)


def test_plane_invariants_enforced():
    with pytest.raises(ValueError):
        ReferencePlane(World3(0, 0, 0), World3(0, 0, 1),
                       World3(1, 0, 0), World3(1, 0, 0))
    with pytest.raises(ValueError):  # left-handed basis
        ReferencePlane(World3(0, 0, 0), World3(0, 0, 1),
                       World3(0, 1, 0), World3(1, 0, 0))
