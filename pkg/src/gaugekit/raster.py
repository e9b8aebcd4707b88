"""Deterministic software rasterizer: RenderPlan -> pixels -> PNG bytes.

Rendering is coverage-based with 4x supersampling (a 2x2 sample grid per
pixel) and a half-pixel linear ramp at every edge, evaluated with plain
IEEE arithmetic on numpy arrays; no system text stack, no GPU, no
platform-dependent code paths. The same plan produces the same bytes on
every run.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .core import GaugekitError, Rng
from .font import STROKE_FRAC, layout_text
from .plan import (
    ArcStroke,
    Disc,
    DrumCell,
    EdgeLine,
    LevelLine,
    Pointer,
    Poly,
    RadialShade,
    RenderPlan,
    Ring,
    Segment,
    SegmentCell,
    TextRun,
    face_point,
)

_SS = 2  # supersamples per axis (4 samples per pixel)


class RasterError(GaugekitError):
    pass


@dataclass
class Canvas:
    """Row-major RGBA8 pixel buffer."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width, 4) uint8

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("canvas dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 4):
            raise ValueError("pixel buffer shape mismatch")
        if self.pixels.dtype != np.uint8:
            raise ValueError("pixel buffer must be uint8")

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def copy(self) -> "Canvas":
        return Canvas(self.width, self.height, self.pixels.copy())


@dataclass(frozen=True)
class PerturbationParams:
    """Orientation and imaging degradations applied after rasterization."""

    rotation: float = 0.0  # degrees, clockwise
    tilt: tuple[float, float] = (0.0, 0.0)  # perspective coefficients
    noise_amplitude: float = 0.0  # 0..1
    blur_radius: float = 0.0  # pixels
    vignette_strength: float = 0.0  # 0..1

    def __post_init__(self):
        if not 0.0 <= self.noise_amplitude <= 1.0:
            raise ValueError("noise_amplitude must be in [0, 1]")
        if not 0.0 <= self.vignette_strength <= 1.0:
            raise ValueError("vignette_strength must be in [0, 1]")
        if self.blur_radius < 0:
            raise ValueError("blur_radius must be >= 0")

    @property
    def is_identity(self) -> bool:
        return (
            self.rotation == 0.0
            and self.tilt == (0.0, 0.0)
            and self.noise_amplitude == 0.0
            and self.blur_radius == 0.0
            and self.vignette_strength == 0.0
        )


# ---------------------------------------------------------------------------
# Supersampled painting
# ---------------------------------------------------------------------------

class _Surface:
    def __init__(self, width: int, height: int, background):
        self.w = width
        self.h = height
        self.sw = width * _SS
        self.sh = height * _SS
        self.buf = np.empty((self.sh, self.sw, 3), dtype=np.float32)
        self.buf[:] = np.asarray(background, dtype=np.float32)

    def _bbox(self, x_lo, x_hi, y_lo, y_hi):
        """Supersample index window covering a real-pixel bbox, or None."""
        sx0 = max(int(math.floor(x_lo * _SS)), 0)
        sy0 = max(int(math.floor(y_lo * _SS)), 0)
        sx1 = min(int(math.ceil(x_hi * _SS)) + 1, self.sw)
        sy1 = min(int(math.ceil(y_hi * _SS)) + 1, self.sh)
        if sx0 >= sx1 or sy0 >= sy1:
            return None
        return sx0, sx1, sy0, sy1

    def _grid(self, box):
        sx0, sx1, sy0, sy1 = box
        xs = (np.arange(sx0, sx1, dtype=np.float32) + np.float32(0.5)) / np.float32(_SS)
        ys = (np.arange(sy0, sy1, dtype=np.float32) + np.float32(0.5)) / np.float32(_SS)
        return xs[None, :], ys[:, None]

    def _blend(self, box, cov, color):
        sx0, sx1, sy0, sy1 = box
        cov = cov[:, :, None]
        region = self.buf[sy0:sy1, sx0:sx1]
        region += cov * (np.asarray(color, dtype=np.float32) - region)

    def _blend_rgb(self, box, cov, rgb):
        sx0, sx1, sy0, sy1 = box
        cov = cov[:, :, None]
        region = self.buf[sy0:sy1, sx0:sx1]
        region += cov * (rgb - region)

    @staticmethod
    def _coverage(sdf_real_px):
        # half-pixel AA ramp at supersample resolution
        return np.clip(np.float32(0.5) - sdf_real_px * np.float32(_SS), 0.0, 1.0)

    def _clip_cov(self, box, cov, clip_rect):
        if clip_rect is None:
            return cov
        cx0, cy0, cx1, cy1 = clip_rect
        X, Y = self._grid(box)
        inside_x = np.clip(
            np.minimum(X - cx0, cx1 - X) * np.float32(_SS) + np.float32(0.5), 0.0, 1.0
        )
        inside_y = np.clip(
            np.minimum(Y - cy0, cy1 - Y) * np.float32(_SS) + np.float32(0.5), 0.0, 1.0
        )
        return cov * inside_x * inside_y

    # -- painters ----------------------------------------------------------

    def capsule(self, x0, y0, x1, y1, width, color, clip_rect=None):
        if width <= 0:
            return
        half = width / 2.0
        pad = half + 1.0
        box = self._bbox(min(x0, x1) - pad, max(x0, x1) + pad, min(y0, y1) - pad, max(y0, y1) + pad)
        if box is None:
            return
        X, Y = self._grid(box)
        ex = np.float32(x1 - x0)
        ey = np.float32(y1 - y0)
        ee = ex * ex + ey * ey
        dx = X - np.float32(x0)
        dy = Y - np.float32(y0)
        if ee > 0:
            t = np.clip((dx * ex + dy * ey) / ee, 0.0, 1.0)
            dx = dx - t * ex
            dy = dy - t * ey
        sdf = np.sqrt(dx * dx + dy * dy) - np.float32(half)
        cov = self._clip_cov(box, self._coverage(sdf), clip_rect)
        self._blend(box, cov, color)

    def disc(self, cx, cy, r, color):
        pad = 1.0
        box = self._bbox(cx - r - pad, cx + r + pad, cy - r - pad, cy + r + pad)
        if box is None:
            return
        X, Y = self._grid(box)
        dx = X - np.float32(cx)
        dy = Y - np.float32(cy)
        sdf = np.sqrt(dx * dx + dy * dy) - np.float32(r)
        self._blend(box, self._coverage(sdf), color)

    def ring(self, cx, cy, r, width, color):
        half = width / 2.0
        pad = half + 1.0
        box = self._bbox(cx - r - pad, cx + r + pad, cy - r - pad, cy + r + pad)
        if box is None:
            return
        X, Y = self._grid(box)
        dx = X - np.float32(cx)
        dy = Y - np.float32(cy)
        sdf = np.abs(np.sqrt(dx * dx + dy * dy) - np.float32(r)) - np.float32(half)
        self._blend(box, self._coverage(sdf), color)

    def radial_shade(self, cx, cy, r, inner, outer):
        pad = 1.0
        box = self._bbox(cx - r - pad, cx + r + pad, cy - r - pad, cy + r + pad)
        if box is None:
            return
        X, Y = self._grid(box)
        dx = X - np.float32(cx)
        dy = Y - np.float32(cy)
        dist = np.sqrt(dx * dx + dy * dy)
        cov = self._coverage(dist - np.float32(r))
        t = np.clip(dist / np.float32(r), 0.0, 1.0)[:, :, None]
        inner_c = np.asarray(inner, dtype=np.float32)
        outer_c = np.asarray(outer, dtype=np.float32)
        rgb = inner_c + t * (outer_c - inner_c)
        self._blend_rgb(box, cov, rgb)

    def polygon(self, points, color):
        n = len(points)
        if n < 3:
            return
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        box = self._bbox(min(xs) - 1.0, max(xs) + 1.0, min(ys) - 1.0, max(ys) + 1.0)
        if box is None:
            return
        X, Y = self._grid(box)
        shape = (Y.shape[0], X.shape[1])
        min_d2 = np.full(shape, np.inf, dtype=np.float32)
        inside = np.zeros(shape, dtype=bool)
        for i in range(n):
            ax, ay = points[i]
            bx, by = points[(i + 1) % n]
            ex = float(bx - ax)
            ey = float(by - ay)
            dx = X - np.float32(ax)
            dy = Y - np.float32(ay)
            ee = ex * ex + ey * ey
            if ee > 0:
                t = np.clip((dx * np.float32(ex) + dy * np.float32(ey)) / np.float32(ee), 0.0, 1.0)
                qx = dx - t * np.float32(ex)
                qy = dy - t * np.float32(ey)
            else:
                qx, qy = dx, dy
            min_d2 = np.minimum(min_d2, qx * qx + qy * qy)
            if ey != 0:
                # even-odd crossing test against a ray toward +x
                cond = (np.float32(ay) > Y) != (np.float32(by) > Y)
                inside ^= cond & (X < dy * np.float32(ex / ey) + np.float32(ax))
        sdf = np.sqrt(min_d2)
        sdf = np.where(inside, -sdf, sdf)
        self._blend(box, self._coverage(sdf), color)

    def arc(self, cx, cy, r, start, end, width, color):
        sweep = end - start
        n = max(3, int(math.ceil(abs(sweep) * r / 2.0)))
        prev = face_point(cx, cy, start, r)
        for i in range(1, n + 1):
            a = start + sweep * i / n
            cur = face_point(cx, cy, a, r)
            self.capsule(prev[0], prev[1], cur[0], cur[1], width, color)
            prev = cur

    def finish(self) -> np.ndarray:
        # strided 2x2 box downsample; much faster than mean over axes
        b = self.buf
        ss = b[0::2, 0::2] + b[0::2, 1::2] + b[1::2, 0::2] + b[1::2, 1::2]
        ss *= np.float32(0.25)
        out = np.empty((self.h, self.w, 4), dtype=np.uint8)
        out[:, :, :3] = np.clip(np.rint(ss), 0, 255).astype(np.uint8)
        out[:, :, 3] = 255
        return out


# seven-segment geometry: (x0, y0, x1, y1) in a unit cell, y up
_SEG_LINES = {
    "a": (0.18, 0.95, 0.82, 0.95),
    "b": (0.88, 0.88, 0.88, 0.56),
    "c": (0.88, 0.44, 0.88, 0.12),
    "d": (0.18, 0.05, 0.82, 0.05),
    "e": (0.12, 0.44, 0.12, 0.12),
    "f": (0.12, 0.88, 0.12, 0.56),
    "g": (0.18, 0.50, 0.82, 0.50),
}

SEGMENT_MAP = {
    "0": "abcdef",
    "1": "bc",
    "2": "abged",
    "3": "abgcd",
    "4": "fgbc",
    "5": "afgcd",
    "6": "afgedc",
    "7": "abc",
    "8": "abcdefg",
    "9": "abcdfg",
    "-": "g",
    " ": "",
}

SEGMENT_DECODE = {frozenset(v): k for k, v in SEGMENT_MAP.items()}


def _paint_segment_cell(surface: _Surface, cell: SegmentCell):
    if cell.char not in SEGMENT_MAP:
        raise RasterError(f"seven-segment cell cannot display {cell.char!r}")
    lit = SEGMENT_MAP[cell.char]
    width = max(1.5, cell.w * 0.13)
    for name, (u0, v0, u1, v1) in _SEG_LINES.items():
        color = cell.on_color if name in lit else cell.off_color
        surface.capsule(
            cell.x + u0 * cell.w,
            cell.y + (1.0 - v0) * cell.h,
            cell.x + u1 * cell.w,
            cell.y + (1.0 - v1) * cell.h,
            width,
            color,
        )
    if cell.show_dp:
        surface.disc(cell.x + cell.w * 1.06, cell.y + cell.h * 0.97, width * 0.75, cell.on_color)


def _paint_drum_cell(surface: _Surface, cell: DrumCell):
    surface.polygon(
        (
            (cell.x, cell.y),
            (cell.x + cell.w, cell.y),
            (cell.x + cell.w, cell.y + cell.h),
            (cell.x, cell.y + cell.h),
        ),
        cell.face_color,
    )
    clip = (cell.x, cell.y, cell.x + cell.w, cell.y + cell.h)
    size = cell.h * 0.62
    cx = cell.x + cell.w / 2.0
    baseline = cell.y + cell.h * 0.81
    stroke = max(1.0, STROKE_FRAC * size)
    for digit, shift in (
        (cell.digit, cell.offset * cell.h),
        ((cell.digit + 1) % 10, cell.offset * cell.h - cell.h),
    ):
        for x0, y0, x1, y1 in layout_text(str(digit), cx, baseline - shift, size, "center"):
            surface.capsule(x0, y0, x1, y1, stroke, cell.glyph_color, clip_rect=clip)
    frame_w = max(1.0, cell.w * 0.06)
    for x0, y0, x1, y1 in (
        (cell.x, cell.y, cell.x + cell.w, cell.y),
        (cell.x + cell.w, cell.y, cell.x + cell.w, cell.y + cell.h),
        (cell.x + cell.w, cell.y + cell.h, cell.x, cell.y + cell.h),
        (cell.x, cell.y + cell.h, cell.x, cell.y),
    ):
        surface.capsule(x0, y0, x1, y1, frame_w, cell.frame_color)


def _paint_pointer(surface: _Surface, p: Pointer):
    tipx, tipy = face_point(p.cx, p.cy, p.angle, p.length)
    tailx, taily = face_point(p.cx, p.cy, p.angle, -p.back_length)
    # unit vector perpendicular to the needle, in pixel coords
    ux = math.sin(p.angle)
    uy = -math.cos(p.angle)
    px, py = -uy, ux
    half = p.width / 2.0
    surface.polygon(
        (
            (tipx, tipy),
            (tailx + px * half, taily + py * half),
            (tailx - px * half, taily - py * half),
        ),
        p.color,
    )


def rasterize(plan: RenderPlan, size: tuple[int, int] | None = None) -> Canvas:
    """Draw a plan's primitives in list order onto an RGBA canvas."""
    w, h = size if size is not None else (plan.width, plan.height)
    surface = _Surface(w, h, plan.background)
    for prim in plan.primitives:
        if isinstance(prim, Disc):
            surface.disc(prim.cx, prim.cy, prim.r, prim.color)
        elif isinstance(prim, Ring):
            surface.ring(prim.cx, prim.cy, prim.r, prim.width, prim.color)
        elif isinstance(prim, RadialShade):
            surface.radial_shade(prim.cx, prim.cy, prim.r, prim.inner_color, prim.outer_color)
        elif isinstance(prim, ArcStroke):
            surface.arc(prim.cx, prim.cy, prim.r, prim.start, prim.end, prim.width, prim.color)
        elif isinstance(prim, Segment):
            surface.capsule(prim.x0, prim.y0, prim.x1, prim.y1, prim.width, prim.color)
        elif isinstance(prim, Poly):
            surface.polygon(prim.points, prim.color)
        elif isinstance(prim, TextRun):
            stroke = max(1.0, STROKE_FRAC * prim.size)
            for x0, y0, x1, y1 in layout_text(
                prim.text, prim.x, prim.y, prim.size, prim.align, prim.rotation
            ):
                surface.capsule(x0, y0, x1, y1, stroke, prim.color)
        elif isinstance(prim, SegmentCell):
            _paint_segment_cell(surface, prim)
        elif isinstance(prim, DrumCell):
            _paint_drum_cell(surface, prim)
        elif isinstance(prim, Pointer):
            _paint_pointer(surface, prim)
        elif isinstance(prim, LevelLine):
            if prim.width > 0:
                surface.capsule(prim.x0, prim.y, prim.x1, prim.y, prim.width, prim.color)
        elif isinstance(prim, EdgeLine):
            if prim.width > 0:
                surface.capsule(prim.x, prim.y0, prim.x, prim.y1, prim.width, prim.color)
        else:
            raise RasterError(f"unknown primitive {type(prim).__name__}")
    return Canvas(w, h, surface.finish())


# ---------------------------------------------------------------------------
# Perturbations (warp -> noise -> blur -> vignette, fixed order)
# ---------------------------------------------------------------------------

def _invert3(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0:
        raise RasterError("singular warp matrix")
    return [
        [(e * i - f * h) / det, (c * h - b * i) / det, (b * f - c * e) / det],
        [(f * g - d * i) / det, (a * i - c * g) / det, (c * d - a * f) / det],
        [(d * h - e * g) / det, (b * g - a * h) / det, (a * e - b * d) / det],
    ]


def _matmul3(m, n):
    return [
        [sum(m[r][k] * n[k][c] for k in range(3)) for c in range(3)]
        for r in range(3)
    ]


def _warp(pixels: np.ndarray, rotation_deg: float, tilt: tuple[float, float]) -> np.ndarray:
    h, w = pixels.shape[:2]
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    theta = math.radians(rotation_deg)
    rot = [
        [math.cos(theta), -math.sin(theta), 0.0],
        [math.sin(theta), math.cos(theta), 0.0],
        [0.0, 0.0, 1.0],
    ]
    persp = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [tilt[0], tilt[1], 1.0]]
    to_center = [[1.0, 0.0, -cx], [0.0, 1.0, -cy], [0.0, 0.0, 1.0]]
    from_center = [[1.0, 0.0, cx], [0.0, 1.0, cy], [0.0, 0.0, 1.0]]
    fwd = _matmul3(from_center, _matmul3(persp, _matmul3(rot, to_center)))
    inv = _invert3(fwd)

    xs = np.arange(w, dtype=np.float64)[None, :]
    ys = np.arange(h, dtype=np.float64)[:, None]
    denom = inv[2][0] * xs + inv[2][1] * ys + inv[2][2]
    sx = (inv[0][0] * xs + inv[0][1] * ys + inv[0][2]) / denom
    sy = (inv[1][0] * xs + inv[1][1] * ys + inv[1][2]) / denom

    sx = np.clip(sx, 0.0, w - 1.0)
    sy = np.clip(sy, 0.0, h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0).astype(np.float32)[:, :, None]
    fy = (sy - y0).astype(np.float32)[:, :, None]
    rgb = pixels[:, :, :3].reshape(h * w, 3)  # alpha is constant, skip it
    i00 = (y0 * w + x0).ravel()
    i01 = (y0 * w + x1).ravel()
    i10 = (y1 * w + x0).ravel()
    i11 = (y1 * w + x1).ravel()
    gx = np.float32(1.0) - fx
    gy = np.float32(1.0) - fy
    acc = rgb[i00].reshape(h, w, 3) * (gx * gy)
    acc += rgb[i01].reshape(h, w, 3) * (fx * gy)
    acc += rgb[i10].reshape(h, w, 3) * (gx * fy)
    acc += rgb[i11].reshape(h, w, 3) * (fx * fy)
    out = np.empty((h, w, 4), dtype=np.uint8)
    out[:, :, :3] = np.clip(np.rint(acc), 0, 255).astype(np.uint8)
    out[:, :, 3] = pixels[:, :, 3]
    return out


_VIGNETTE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _vignette_field(w: int, h: int) -> np.ndarray:
    """Squared normalized center distance, cached per canvas size (read-only)."""
    field = _VIGNETTE_CACHE.get((w, h))
    if field is None:
        cx = (w - 1) / 2.0
        cy = (h - 1) / 2.0
        xs = ((np.arange(w, dtype=np.float32) - cx) ** 2)[None, :]
        ys = ((np.arange(h, dtype=np.float32) - cy) ** 2)[:, None]
        field = (xs + ys) / np.float32(cx * cx + cy * cy)
        _VIGNETTE_CACHE[(w, h)] = field
    return field


def _box_blur(pixels: np.ndarray, radius: int) -> np.ndarray:
    """Separable box blur with edge-replicate addressing, exact integer math."""
    img = pixels.astype(np.int32)
    k = 2 * radius + 1
    for axis in (0, 1):
        work = np.swapaxes(img, 0, axis)
        n = work.shape[0]
        pad = [(radius + 1, radius)] + [(0, 0)] * (work.ndim - 1)
        csum = np.cumsum(np.pad(work, pad, mode="edge"), axis=0, dtype=np.int32)
        work = csum[k : k + n] - csum[:n]  # window sums; divided after both passes
        img = np.swapaxes(work, 0, axis)
    k2 = k * k
    return ((img + k2 // 2) // k2).astype(np.uint8)


def apply_perturbations(canvas: Canvas, params: PerturbationParams, rng: Rng) -> Canvas:
    """Warp, noise, blur, and vignette a canvas, in that fixed order.

    All-zero params return a byte-identical copy. Noise is reproducible:
    it is drawn from a PCG64 stream seeded off ``rng``.
    """
    px = canvas.pixels
    if params.rotation != 0.0 or params.tilt != (0.0, 0.0):
        px = _warp(px, params.rotation, params.tilt)
    else:
        px = px.copy()
    h, w = px.shape[:2]
    if params.noise_amplitude > 0.0:
        amp = int(round(params.noise_amplitude * 255))
        if amp > 0:
            gen = np.random.Generator(np.random.PCG64(rng.next_u64()))
            noise = gen.integers(-amp, amp + 1, size=(h, w, 1), dtype=np.int16)
            rgb = px[:, :, :3].astype(np.int16) + noise
            px[:, :, :3] = np.clip(rgb, 0, 255).astype(np.uint8)
    radius = int(round(params.blur_radius))
    if radius > 0:
        px[:, :, :3] = _box_blur(px[:, :, :3], radius)
    if params.vignette_strength > 0.0:
        factor = 1.0 - np.float32(params.vignette_strength) * _vignette_field(w, h)
        px[:, :, :3] = np.clip(
            np.rint(px[:, :, :3] * factor[:, :, None]), 0, 255
        ).astype(np.uint8)
    return Canvas(w, h, px)


# ---------------------------------------------------------------------------
# PNG encoding (fixed filter and compression level, hence deterministic)
# ---------------------------------------------------------------------------

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def _chunk(tag: bytes, data: bytes) -> bytes:
    crc = zlib.crc32(tag + data) & 0xFFFFFFFF
    return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", crc)


def encode_png(canvas: Canvas) -> bytes:
    """Encode as 8-bit RGBA PNG with the Up filter on every scanline."""
    px = canvas.pixels
    h, w = px.shape[:2]
    flat = px.reshape(h, w * 4)
    up = flat.copy()
    up[1:] -= flat[:-1]
    scanlines = np.concatenate(
        [np.full((h, 1), 2, dtype=np.uint8), up], axis=1
    ).tobytes()
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 6, 0, 0, 0)
    return b"".join(
        (
            _PNG_SIG,
            _chunk(b"IHDR", ihdr),
            _chunk(b"IDAT", zlib.compress(scanlines, _ZLIB_LEVEL)),
            _chunk(b"IEND", b""),
        )
    )
