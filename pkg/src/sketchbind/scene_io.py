"""Scene-recording container and CSV export.

Container layout (one directory per scene):

    scene.json        manifest: version, fps, resolution, plane, intrinsics
    frames/%06d.ppm   binary PPM ("P6", 8-bit, no comments), one per frame
    meta.jsonl        one object per frame:
                      {"frame": i, "t": s, "camera": {"pos": [x,y,z], "quat": [w,x,y,z]}}
    points.jsonl      optional, {"frame": i, "points": {"name": [x,y,z]}}

The format is deliberately codec-free so decoded pixels are bit-exact
and replays are deterministic. Conventional video codecs are out of scope.

CSV exports use ',' separators, '.' decimals, six fractional digits and
LF line endings so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptFrameError,
    FrameCountMismatchError,
    MalformedManifestError,
    UnsupportedVersionError,
)
from .geometry import CameraState, ReferencePlane, World3

SCENE_VERSION = 1


@dataclass(frozen=True)
class Frame:
    """One decoded video frame with its pose."""

    index: int
    t: float
    pixels: np.ndarray  # (height, width, 3) uint8
    camera: CameraState


@dataclass
class SceneRecording:
    """A loaded scene: manifest, frame references, and per-frame poses."""

    root: Path
    version: int
    fps: float
    width: int
    height: int
    plane: ReferencePlane
    intrinsics: tuple  # (fx, fy, cx, cy)
    frame_paths: list
    times: list
    poses: list  # CameraState per frame
    external_points: dict = field(default_factory=dict)  # frame index -> {name: World3}

    def __len__(self) -> int:
        return len(self.frame_paths)

    @property
    def duration(self) -> float:
        return len(self.frame_paths) / self.fps

    def frame_at(self, t: float) -> int:
        """Index of the frame covering time ``t`` (clamped to valid range)."""
        i = int(np.floor(t * self.fps + 1e-9))
        return min(max(i, 0), len(self) - 1)


def _require(cond: bool, message: str):
    if not cond:
        raise MalformedManifestError(message)


def _vec3(obj, what: str) -> World3:
    _require(isinstance(obj, (list, tuple)) and len(obj) == 3, f"{what} must be a 3-vector")
    return World3(float(obj[0]), float(obj[1]), float(obj[2]))


def _parse_plane(obj) -> ReferencePlane:
    _require(isinstance(obj, dict), "plane must be an object")
    try:
        return ReferencePlane(
            origin=_vec3(obj["origin"], "plane.origin"),
            normal=_vec3(obj["normal"], "plane.normal"),
            basis_u=_vec3(obj["basisU"], "plane.basisU"),
            basis_v=_vec3(obj["basisV"], "plane.basisV"),
        )
    except KeyError as exc:
        raise MalformedManifestError(f"plane is missing {exc}") from None
    except ValueError as exc:
        raise MalformedManifestError(f"invalid plane: {exc}") from None


def load_scene(path) -> SceneRecording:
    """Load a scene container; validates the manifest and frame count."""
    root = Path(path)
    manifest_path = root / "scene.json"
    if not manifest_path.is_file():
        raise MalformedManifestError(f"no scene.json under {root}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedManifestError(f"unreadable manifest: {exc}") from exc
    _require(isinstance(manifest, dict), "manifest must be an object")

    version = manifest.get("version")
    if version != SCENE_VERSION:
        raise UnsupportedVersionError(f"scene version {version!r}, expected {SCENE_VERSION}")

    fps = manifest.get("fps")
    _require(isinstance(fps, (int, float)) and fps > 0, f"fps must be > 0, got {fps!r}")
    res = manifest.get("resolution")
    _require(isinstance(res, (list, tuple)) and len(res) == 2, "resolution must be [width, height]")
    width, height = int(res[0]), int(res[1])
    _require(width > 0 and height > 0, "resolution must be positive")

    plane = _parse_plane(manifest.get("plane"))
    intr = manifest.get("intrinsics")
    _require(isinstance(intr, dict), "intrinsics must be an object")
    try:
        intrinsics = (float(intr["fx"]), float(intr["fy"]), float(intr["cx"]), float(intr["cy"]))
    except KeyError as exc:
        raise MalformedManifestError(f"intrinsics missing {exc}") from None
    _require(intrinsics[0] > 0 and intrinsics[1] > 0, "focal lengths must be positive")

    meta_path = root / "meta.jsonl"
    if not meta_path.is_file():
        raise MalformedManifestError("missing meta.jsonl")
    times, poses = [], []
    fx, fy, cx, cy = intrinsics
    with meta_path.open() as fh:
        for lineno, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                t = float(rec["t"])
                pos = _vec3(rec["camera"]["pos"], "camera.pos")
                quat = tuple(float(c) for c in rec["camera"]["quat"])
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise MalformedManifestError(f"meta.jsonl line {lineno}: {exc}") from None
            _require(len(quat) == 4, f"meta.jsonl line {lineno}: quat must have 4 components")
            if times and t <= times[-1]:
                raise MalformedManifestError("frame timestamps must be strictly increasing")
            times.append(t)
            try:
                poses.append(CameraState(pos, quat, fx, fy, cx, cy, width, height))
            except ValueError as exc:
                raise MalformedManifestError(f"meta.jsonl line {lineno}: {exc}") from None
    _require(len(times) > 0, "scene has no frames")

    frames_dir = root / "frames"
    frame_paths = [frames_dir / f"{i:06d}.ppm" for i in range(len(times))]
    existing = sorted(frames_dir.glob("*.ppm")) if frames_dir.is_dir() else []
    if len(existing) != len(frame_paths) or any(not p.is_file() for p in frame_paths):
        raise FrameCountMismatchError(
            f"{len(existing)} frame files for {len(frame_paths)} meta entries")

    external = {}
    points_path = root / "points.jsonl"
    if points_path.is_file():
        with points_path.open() as fh:
            for lineno, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    idx = int(rec["frame"])
                    pts = {str(k): _vec3(v, f"point {k}") for k, v in rec["points"].items()}
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    raise MalformedManifestError(f"points.jsonl line {lineno}: {exc}") from None
                external[idx] = pts

    return SceneRecording(root, version, float(fps), width, height, plane,
                          intrinsics, frame_paths, times, poses, external)


def _decode_ppm(data: bytes, path) -> np.ndarray:
    # strict P6 subset: "P6\n<w> <h>\n255\n" + raw RGB, no comments
    try:
        if not data.startswith(b"P6"):
            raise CorruptFrameError(f"{path}: not a P6 file")
        fields = []
        i = 2
        while len(fields) < 3:
            while i < len(data) and data[i:i + 1].isspace():
                i += 1
            j = i
            while j < len(data) and not data[j:j + 1].isspace():
                j += 1
            if i == j:
                raise CorruptFrameError(f"{path}: truncated header")
            fields.append(int(data[i:j]))
            i = j
        i += 1  # single whitespace byte after maxval
        width, height, maxval = fields
        if maxval != 255 or width <= 0 or height <= 0:
            raise CorruptFrameError(f"{path}: unsupported PPM parameters")
        body = data[i:]
        expected = width * height * 3
        if len(body) != expected:
            raise CorruptFrameError(f"{path}: {len(body)} pixel bytes, expected {expected}")
        return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy()
    except (ValueError, IndexError) as exc:
        raise CorruptFrameError(f"{path}: {exc}") from exc


def decode_frame(rec: SceneRecording, index: int) -> Frame:
    """Decode frame ``index`` bit-exactly from storage."""
    if not 0 <= index < len(rec):
        raise IndexError(f"frame index {index} out of range [0, {len(rec)})")
    path = rec.frame_paths[index]
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CorruptFrameError(f"{path}: {exc}") from exc
    pixels = _decode_ppm(data, path)
    if pixels.shape != (rec.height, rec.width, 3):
        raise CorruptFrameError(
            f"{path}: frame is {pixels.shape[1]}x{pixels.shape[0]}, "
            f"scene is {rec.width}x{rec.height}")
    return Frame(index, rec.times[index], pixels, rec.poses[index])


def encode_ppm(pixels: np.ndarray) -> bytes:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    height, width = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (width, height) + pixels.tobytes()


class SceneWriter:
    """Writes a scene container frame by frame (used by the generators)."""

    def __init__(self, root, fps: float, width: int, height: int,
                 plane: ReferencePlane, intrinsics: tuple):
        if fps <= 0:
            raise ValueError("fps must be > 0")
        self.root = Path(root)
        self.fps = float(fps)
        self.width, self.height = int(width), int(height)
        self.plane = plane
        self.intrinsics = tuple(float(v) for v in intrinsics)
        self._meta = []
        self._points = {}
        (self.root / "frames").mkdir(parents=True, exist_ok=True)

    def add_frame(self, pixels: np.ndarray, camera: CameraState, t=None):
        index = len(self._meta)
        if t is None:
            t = index / self.fps
        (self.root / "frames" / f"{index:06d}.ppm").write_bytes(encode_ppm(pixels))
        self._meta.append({
            "frame": index,
            "t": t,
            "camera": {
                "pos": [camera.position.x, camera.position.y, camera.position.z],
                "quat": list(camera.orientation),
            },
        })
        return index

    def add_points(self, frame_index: int, points: dict):
        self._points[frame_index] = {
            name: [p.x, p.y, p.z] for name, p in sorted(points.items())
        }

    def close(self):
        plane = self.plane
        manifest = {
            "version": SCENE_VERSION,
            "fps": self.fps,
            "resolution": [self.width, self.height],
            "plane": {
                "origin": [plane.origin.x, plane.origin.y, plane.origin.z],
                "normal": [plane.normal.x, plane.normal.y, plane.normal.z],
                "basisU": [plane.basis_u.x, plane.basis_u.y, plane.basis_u.z],
                "basisV": [plane.basis_v.x, plane.basis_v.y, plane.basis_v.z],
            },
            "intrinsics": dict(zip(("fx", "fy", "cx", "cy"), self.intrinsics)),
        }
        (self.root / "scene.json").write_text(json.dumps(manifest, indent=2) + "\n")
        with (self.root / "meta.jsonl").open("w") as fh:
            for rec in self._meta:
                fh.write(json.dumps(rec) + "\n")
        if self._points:
            with (self.root / "points.jsonl").open("w") as fh:
                for idx in sorted(self._points):
                    fh.write(json.dumps({"frame": idx, "points": self._points[idx]}) + "\n")


class VariableLog:
    """Ordered (t, name -> value) samples; columns keep registration order."""

    def __init__(self):
        self.names = []
        self.samples = []

    def register(self, name: str):
        if name not in self.names:
            self.names.append(name)

    def append(self, t: float, values: dict):
        if self.samples and t < self.samples[-1][0]:
            raise ValueError("log timestamps must be non-decreasing")
        for name in values:
            self.register(name)
        self.samples.append((t, dict(values)))

    def clear_samples(self):
        self.samples = []


def format_value(x: float) -> str:
    return f"{float(x):.6f}"


def write_csv(path, header, rows):
    """Write rows of floats (or '' for missing) with the repo-wide format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def export_csv(log: VariableLog, path):
    """Export a VariableLog: header ``t,<names...>``, one row per sample."""
    header = ["t"] + list(log.names)
    rows = [[t] + [values.get(name) for name in log.names] for t, values in log.samples]
    write_csv(path, header, rows)
