"""Color-model object selection and per-frame centroid tracking.

Tracking is plain HSV thresholding: take the mask of pixels within the
model tolerances (hue wrap-aware), keep the largest 4-connected
component, return its centroid. Small components are rejected as noise.
Lost targets hold their last position and are flagged stale.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

try:
    import cv2
except ImportError:  # pragma: no cover - exercised via the numpy fallback test
    cv2 = None

from .errors import TapOutOfBoundsError
from .geometry import (
    NoIntersectionError,
    Screen2,
    World3,
    project_to_screen,
    ray_cast_to_plane,
)

DEFAULT_HUE_TOL = 10.0
DEFAULT_SAT_TOL = 0.25
DEFAULT_VAL_TOL = 0.25
MIN_COMPONENT_BASE = 30       # pixels at 640x480, scaled by resolution area
TAP_NEIGHBORHOOD = 5          # median window around the tap, pixels

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


@dataclass(frozen=True)
class ColorModel:
    h: float                      # degrees, [0, 360)
    s: float                      # [0, 1]
    v: float                      # [0, 1]
    dh: float = DEFAULT_HUE_TOL
    ds: float = DEFAULT_SAT_TOL
    dv: float = DEFAULT_VAL_TOL

    def __post_init__(self):
        if not (self.dh > 0 and self.ds > 0 and self.dv > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class TrackResult:
    centroid: Screen2 | None
    pixel_area: int
    found: bool


@dataclass
class TrackedEntity:
    id: str
    model: ColorModel | None      # None for externally supplied points
    screen_pos: Screen2 | None = None
    world_pos: World3 | None = None
    found: bool = False
    stale_since: float | None = None
    external: bool = False


def rgb_to_hsv(r: int, g: int, b: int):
    """Hexcone RGB(8-bit) -> (h degrees [0,360), s [0,1], v [0,1])."""
    rf, gf, bf = r / 255.0, g / 255.0, b / 255.0
    v = max(rf, gf, bf)
    c = v - min(rf, gf, bf)
    s = 0.0 if v == 0 else c / v
    if c == 0:
        h = 0.0
    elif v == rf:
        h = (60.0 * ((gf - bf) / c)) % 360.0
    elif v == gf:
        h = 60.0 * ((bf - rf) / c) + 120.0
    else:
        h = 60.0 * ((rf - gf) / c) + 240.0
    return h % 360.0, s, v


_scratch = threading.local()


def _float_scratch(name: str, shape) -> np.ndarray:
    # reusing large temps sidesteps a per-call page-allocation stall
    buf = getattr(_scratch, name, None)
    if buf is None or buf.shape != shape:
        buf = np.empty(shape, dtype=np.float32)
        setattr(_scratch, name, buf)
    return buf


def rgb_to_hsv_image(pixels: np.ndarray) -> np.ndarray:
    """Vectorized :func:`rgb_to_hsv` over an (h, w, 3) uint8 buffer.

    Uses OpenCV when available (same convention, an order of magnitude
    faster); the numpy path is the fallback and the reference in tests.
    """
    if cv2 is not None:
        rgb = _float_scratch("rgb", pixels.shape)
        np.multiply(pixels, np.float32(1.0 / 255.0), out=rgb)
        return cv2.cvtColor(rgb, cv2.COLOR_RGB2HSV)
    return _rgb_to_hsv_image_numpy(pixels)


def _rgb_to_hsv_image_numpy(pixels: np.ndarray) -> np.ndarray:
    rgb = pixels.astype(np.float32) * np.float32(1.0 / 255.0)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.max(rgb, axis=-1)
    c = v - np.min(rgb, axis=-1)
    safe_c = np.where(c == 0, 1.0, c).astype(np.float32)
    h = np.where(
        v == r, (g - b) / safe_c % 6.0,
        np.where(v == g, (b - r) / safe_c + 2.0, (r - g) / safe_c + 4.0),
    )
    h = np.where(c == 0, 0.0, h * 60.0 % 360.0)
    s = np.where(v == 0, 0.0, c / np.where(v == 0, 1.0, v))
    return np.stack([h, s, v], axis=-1)


def min_component_size(width: int, height: int) -> int:
    return max(1, round(MIN_COMPONENT_BASE * (width * height) / (640 * 480)))


def _circular_median_hue(hues: np.ndarray) -> float:
    # median around the circular mean so wrap-adjacent hues don't split
    rad = np.radians(hues)
    ref = np.degrees(np.arctan2(np.sin(rad).sum(), np.cos(rad).sum()))
    unwrapped = (hues - ref + 180.0) % 360.0 - 180.0 + ref
    return float(np.median(unwrapped)) % 360.0


def select_color_target(frame, tap: Screen2, dh=DEFAULT_HUE_TOL,
                        ds=DEFAULT_SAT_TOL, dv=DEFAULT_VAL_TOL) -> ColorModel:
    """Build a ColorModel from the median HSV of a small patch around a tap."""
    pixels = frame.pixels
    height, width = pixels.shape[:2]
    col, row = int(round(tap.u)), int(round(tap.v))
    if not (0 <= col < width and 0 <= row < height):
        raise TapOutOfBoundsError(f"tap ({tap.u}, {tap.v}) outside {width}x{height} frame")
    half = TAP_NEIGHBORHOOD // 2
    patch = pixels[max(0, row - half):row + half + 1, max(0, col - half):col + half + 1]
    hsv = rgb_to_hsv_image(patch).reshape(-1, 3).astype(np.float64)
    return ColorModel(
        h=_circular_median_hue(hsv[:, 0]),
        s=float(np.median(hsv[:, 1])),
        v=float(np.median(hsv[:, 2])),
        dh=dh, ds=ds, dv=dv,
    )


def color_mask(hsv: np.ndarray, model: ColorModel) -> np.ndarray:
    shape = hsv.shape[:-1]
    work = _float_scratch("mask_a", shape)
    flip = _float_scratch("mask_b", shape)
    np.subtract(hsv[..., 0], np.float32(model.h), out=work)
    np.abs(work, out=work)
    np.subtract(np.float32(360.0), work, out=flip)
    np.minimum(work, flip, out=work)  # hue distance, wrap-aware
    mask = work <= np.float32(model.dh)
    np.subtract(hsv[..., 1], np.float32(model.s), out=work)
    np.abs(work, out=work)
    mask &= work <= np.float32(model.ds)
    np.subtract(hsv[..., 2], np.float32(model.v), out=work)
    np.abs(work, out=work)
    mask &= work <= np.float32(model.dv)
    return mask


def track(frame, model: ColorModel, hsv: np.ndarray | None = None) -> TrackResult:
    """Centroid of the largest matching 4-connected component.

    ``hsv`` may carry a precomputed :func:`rgb_to_hsv_image` result so
    several models can share one conversion per frame. Absence of a
    large-enough component is reported as ``found=False``, not an error.
    """
    if hsv is None:
        hsv = rgb_to_hsv_image(frame.pixels)
    height, width = hsv.shape[:2]
    mask = color_mask(hsv, model)
    labels, count = ndimage.label(mask, structure=FOUR_CONNECTED)
    if count == 0:
        return TrackResult(None, 0, False)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    best_size = int(sizes.max())
    if best_size < min_component_size(width, height):
        return TrackResult(None, 0, False)
    candidates = np.flatnonzero(sizes == best_size)
    best = None
    for label in candidates:
        rows, cols = np.nonzero(labels == label)
        centroid = (float(cols.mean()), float(rows.mean()))
        if best is None or centroid < best:
            best = centroid
    return TrackResult(Screen2(best[0], best[1]), best_size, True)


def update_entity(entity: TrackedEntity, frame, camera, plane,
                  result: TrackResult | None = None) -> TrackedEntity:
    """Advance one entity by one frame (mutates and returns ``entity``).

    On a hit the screen/world positions are refreshed and staleness is
    cleared; on a miss the last positions are held and ``stale_since``
    records when the target was first lost.
    """
    if result is None:
        result = track(frame, entity.model)
    if result.found:
        try:
            world = ray_cast_to_plane(camera, plane, result.centroid)
        except NoIntersectionError:
            world = None
        if world is not None:
            entity.screen_pos = result.centroid
            entity.world_pos = world
            entity.found = True
            entity.stale_since = None
            return entity
    entity.found = False
    if entity.stale_since is None:
        entity.stale_since = frame.t
    return entity


def external_entity(name: str) -> TrackedEntity:
    """Wrap an externally supplied point stream (e.g. a body joint)."""
    return TrackedEntity(id=name, model=None, external=True)


def update_external(entity: TrackedEntity, frame, camera, point: World3 | None) -> TrackedEntity:
    if point is None:
        entity.found = False
        if entity.stale_since is None:
            entity.stale_since = frame.t
        return entity
    entity.world_pos = point
    try:
        entity.screen_pos = project_to_screen(camera, point)
    except Exception:
        entity.screen_pos = None
    entity.found = True
    entity.stale_since = None
    return entity
