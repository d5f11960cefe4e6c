"""Rasterization of strokes and of whole sequences.

Strokes are flattened to polylines and stamped as capsules (a disk swept
along each segment), which gives round caps and round joins for free. A
pixel is covered when its center lies within half the stroke width of the
polyline. Filled strokes instead scan-fill their flattened outline with
the even-odd rule; a filled stroke whose outline degenerates to fewer than
three points falls back to the outline stamp so it stays visible.

Everything is painter's algorithm over an opaque canvas: later strokes
simply overwrite earlier pixels. With antialias enabled, edge pixels blend
by coverage instead; the default is hard edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .model import Color, Point, Stroke, StrokeSet, flatten
from .sequencing import GlobalSequence

FLATTEN_TOLERANCE = 0.25


@dataclass(eq=False)
class Canvas:
    """A mutable RGB pixel buffer; (0, 0) is the top-left pixel's corner."""

    pixels: np.ndarray  # (height, width, 3) uint8
    background: Color = Color(255, 255, 255)

    @classmethod
    def create(cls, width: int, height: int, background: Color = Color(255, 255, 255)) -> "Canvas":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:, :] = background
        return cls(px, background)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def copy(self) -> "Canvas":
        return Canvas(self.pixels.copy(), self.background)

    def same_pixels(self, other: "Canvas") -> bool:
        return bool(np.array_equal(self.pixels, other.pixels))


def _stamp_segment(
    canvas: Canvas, a: Point, b: Point, half: float, color: np.ndarray, antialias: bool
) -> None:
    w, h = canvas.width, canvas.height
    reach = half + (1.0 if antialias else 0.5)
    x0 = max(0, int(math.floor(min(a.x, b.x) - reach)))
    x1 = min(w - 1, int(math.ceil(max(a.x, b.x) + reach)))
    y0 = max(0, int(math.floor(min(a.y, b.y) - reach)))
    y1 = min(h - 1, int(math.ceil(max(a.y, b.y) + reach)))
    if x0 > x1 or y0 > y1:
        return
    xs = np.arange(x0, x1 + 1) + 0.5
    ys = np.arange(y0, y1 + 1) + 0.5
    px = xs[None, :] - a.x
    py = ys[:, None] - a.y
    dx, dy = b.x - a.x, b.y - a.y
    seg2 = dx * dx + dy * dy
    if seg2 > 0.0:
        t = np.clip((px * dx + py * dy) / seg2, 0.0, 1.0)
        ex = px - t * dx
        ey = py - t * dy
    else:
        ex, ey = px + 0.0 * py, py + 0.0 * px
    dist = np.sqrt(ex * ex + ey * ey)
    window = canvas.pixels[y0 : y1 + 1, x0 : x1 + 1]
    if antialias:
        cover = np.clip(half + 0.5 - dist, 0.0, 1.0)
        if cover.max() <= 0.0:
            return
        alpha = cover[:, :, None]
        blended = window.astype(np.float64) * (1.0 - alpha) + color[None, None, :] * alpha
        window[:] = (blended + 0.5).astype(np.uint8)
    else:
        mask = dist <= half
        window[mask] = color


def _stamp_polyline(
    canvas: Canvas, pts: Sequence[Point], width: float, color: np.ndarray, antialias: bool
) -> None:
    half = width / 2.0
    if len(pts) == 1:
        _stamp_segment(canvas, pts[0], pts[0], half, color, antialias)
        return
    for a, b in zip(pts, pts[1:]):
        _stamp_segment(canvas, a, b, half, color, antialias)


def _fill_polygon(canvas: Canvas, pts: Sequence[Point], color: np.ndarray) -> None:
    """Even-odd scanline fill over pixel centers."""
    poly = np.asarray(pts, dtype=np.float64)
    if not np.array_equal(poly[0], poly[-1]):
        poly = np.vstack([poly, poly[:1]])
    x1s, y1s = poly[:-1, 0], poly[:-1, 1]
    x2s, y2s = poly[1:, 0], poly[1:, 1]
    h, w = canvas.height, canvas.width
    ymin = max(0, int(math.floor(poly[:, 1].min() - 0.5)))
    ymax = min(h - 1, int(math.ceil(poly[:, 1].max() + 0.5)))
    for py in range(ymin, ymax + 1):
        yc = py + 0.5
        crosses = ((y1s <= yc) & (y2s > yc)) | ((y2s <= yc) & (y1s > yc))
        if not crosses.any():
            continue
        xa, ya = x1s[crosses], y1s[crosses]
        xb, yb = x2s[crosses], y2s[crosses]
        xs = np.sort(xa + (yc - ya) * (xb - xa) / (yb - ya))
        for k in range(0, len(xs) - 1, 2):
            left = int(math.ceil(xs[k] - 0.5))
            right = int(math.ceil(xs[k + 1] - 0.5))  # center in [xs[k], xs[k+1])
            if right <= 0 or left >= w:
                continue
            canvas.pixels[py, max(0, left) : min(w, right)] = color


def draw_stroke(canvas: Canvas, stroke: Stroke, *, antialias: bool = False) -> Canvas:
    """Draw one stroke onto the canvas (in place) and return the canvas."""
    pts = flatten(stroke, FLATTEN_TOLERANCE)
    color = np.array(stroke.color, dtype=np.uint8)
    if stroke.filled:
        distinct = len({(p.x, p.y) for p in pts})
        if distinct >= 3:
            _fill_polygon(canvas, pts, color)
        else:
            _stamp_polyline(canvas, pts, stroke.width, color, antialias)
    else:
        _stamp_polyline(canvas, pts, stroke.width, color, antialias)
    return canvas


def _ordered_strokes(seq: GlobalSequence, stroke_set: StrokeSet) -> list[Stroke]:
    index = stroke_set.by_id()
    return [index[sid] for sid, _ in seq.iter_ranked()]


def iter_frames(
    seq: GlobalSequence,
    stroke_set: StrokeSet,
    every: int,
    *,
    antialias: bool = False,
) -> Iterator[tuple[int, Canvas]]:
    """Yield (strokes_drawn, canvas) at every checkpoint, reusing one buffer.

    Checkpoints are every, 2*every, ... plus the final count; when the
    final count is already a multiple of ``every`` it is not repeated.
    The yielded canvas is live, so consume it before advancing.
    """
    if every < 1:
        raise ValueError("every must be >= 1")
    strokes = _ordered_strokes(seq, stroke_set)
    canvas = Canvas.create(int(round(stroke_set.canvas_width)), int(round(stroke_set.canvas_height)))
    n = len(strokes)
    if n == 0:
        yield 0, canvas
        return
    for i, s in enumerate(strokes, start=1):
        draw_stroke(canvas, s, antialias=antialias)
        if i % every == 0 or i == n:
            yield i, canvas


def render_frames(
    seq: GlobalSequence,
    stroke_set: StrokeSet,
    every: int,
    *,
    antialias: bool = False,
) -> list[Canvas]:
    """Snapshot list of the drawing in progress; see iter_frames."""
    return [canvas.copy() for _, canvas in iter_frames(seq, stroke_set, every, antialias=antialias)]


def render_all(seq: GlobalSequence, stroke_set: StrokeSet, *, antialias: bool = False) -> Canvas:
    """The finished drawing: all strokes in rank order on one canvas."""
    canvas = Canvas.create(int(round(stroke_set.canvas_width)), int(round(stroke_set.canvas_height)))
    for s in _ordered_strokes(seq, stroke_set):
        draw_stroke(canvas, s, antialias=antialias)
    return canvas
