"""Raster to stroke conversion.

The pipeline is: quantize colors (paint) or binarize (sketch), trace region
boundaries with Moore neighbor tracing, thin the polylines with
Douglas-Peucker, then fit each smooth run with least-squares cubics,
splitting at corners and wherever the fit error exceeds the budget.

Fitting follows the classic recursive scheme from Schneider's curve fitting
algorithm: chord-length parameterization, a closed-form least squares for
the two tangent magnitudes, a few Newton-Raphson reparameterization rounds,
and a split at the worst point when the error will not come down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateContour, EmptyImage, TooManyColors
from .model import Color, Point, Stream, Stroke, StrokeKind, StrokeSet
from .raster import RasterImage, gray_image


@dataclass(frozen=True)
class FitParams:
    """Knobs for the raster-to-stroke conversion."""

    max_error: float = 1.0
    corner_angle_deg: float = 60.0
    simplify_epsilon: float = 0.5
    posterize_levels: int = 8

    def __post_init__(self) -> None:
        if not (self.max_error > 0):
            raise ValueError("max_error must be positive")
        if not (0.0 < self.corner_angle_deg < 180.0):
            raise ValueError("corner_angle_deg must lie in (0, 180)")
        if self.simplify_epsilon < 0:
            raise ValueError("simplify_epsilon must be >= 0")
        if not (2 <= int(self.posterize_levels) <= 256):
            raise ValueError("posterize_levels must lie in [2, 256]")


@dataclass(frozen=True)
class Contour:
    """A traced boundary polyline; closed when first and last points match."""

    points: tuple[Point, ...]
    color: Color

    def __post_init__(self) -> None:
        pts = tuple(Point(float(p[0]), float(p[1])) for p in self.points)
        if len(pts) < 2:
            raise DegenerateContour(f"contour needs at least 2 points, got {len(pts)}")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise DegenerateContour("consecutive contour points coincide")
        object.__setattr__(self, "points", pts)

    @property
    def closed(self) -> bool:
        return self.points[0] == self.points[-1]


# ---------------------------------------------------------------------------
# posterize


def posterize(image: RasterImage, levels: int) -> RasterImage:
    """Quantize every channel to ``levels`` uniform bins.

    A value v lands in bin floor(v * levels / 256) and is replaced by the
    rounded bin center; 256 levels reproduce the input exactly.
    """
    if not (2 <= levels <= 256):
        raise ValueError("levels must lie in [2, 256]")
    centers = np.array(
        [math.floor((i + 0.5) * 255.0 / levels + 0.5) for i in range(levels)],
        dtype=np.uint8,
    )
    bins = (image.pixels.astype(np.int32) * levels) >> 8
    return RasterImage(centers[bins])


# ---------------------------------------------------------------------------
# contour tracing

# Moore neighborhood in clockwise screen order (x right, y down)
_OFF = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_OFF_INDEX = {o: i for i, o in enumerate(_OFF)}


def _trace_boundary(rows: list[list[int]], sx: int, sy: int) -> list[tuple[int, int]]:
    """Moore neighbor tracing from the uppermost-leftmost pixel (sx, sy).

    ``rows`` is a padded 0/1 grid indexed [y][x]. Stops with Jacob's
    criterion: when the start pixel is re-entered from its original
    backtrack direction.
    """
    path = [(sx, sy)]
    start_back = (sx - 1, sy)
    cx, cy = sx, sy
    bx, by = start_back
    limit = 4 * sum(sum(r) for r in rows) + 8
    for _ in range(limit):
        idx = _OFF_INDEX[(bx - cx, by - cy)]
        nx = ny = None
        pbx, pby = bx, by
        for j in range(1, 9):
            ox, oy = _OFF[(idx + j) % 8]
            tx, ty = cx + ox, cy + oy
            if rows[ty][tx]:
                nx, ny = tx, ty
                break
            pbx, pby = tx, ty
        if nx is None:
            return path  # isolated pixel
        if (nx, ny) == (sx, sy) and (pbx, pby) == start_back:
            return path
        path.append((nx, ny))
        cx, cy, bx, by = nx, ny, pbx, pby
    return path  # safety stop; should not be reached


def trace_contours(image: RasterImage) -> list[Contour]:
    """Outer boundaries of all regions that are not background.

    Background is the most frequent color. Regions are 8-connected groups
    of identically colored pixels; those under 4 pixels are noise and get
    dropped. Points are pixel centers, so a pixel (x, y) contributes
    (x + 0.5, y + 0.5). Output is sorted by color, then by the topmost
    leftmost boundary pixel.
    """
    px = image.pixels.astype(np.int32)
    packed = (px[:, :, 0] << 16) | (px[:, :, 1] << 8) | px[:, :, 2]
    colors, counts = np.unique(packed, return_counts=True)
    if len(colors) > 64:
        raise TooManyColors(f"{len(colors)} distinct colors, the limit is 64")
    background = int(colors[int(np.argmax(counts))])

    eight = np.ones((3, 3), dtype=int)
    out: list[Contour] = []
    for color_val in colors:
        cv = int(color_val)
        if cv == background:
            continue
        color = Color((cv >> 16) & 255, (cv >> 8) & 255, cv & 255)
        mask = packed == cv
        labels, n = ndimage.label(mask, structure=eight)
        if n == 0:
            continue
        sizes = ndimage.sum_labels(mask, labels, index=np.arange(1, n + 1))
        slices = ndimage.find_objects(labels)
        for li in range(n):
            if sizes[li] < 4:
                continue
            sl = slices[li]
            sub = labels[sl] == (li + 1)
            padded = np.zeros((sub.shape[0] + 2, sub.shape[1] + 2), dtype=np.uint8)
            padded[1:-1, 1:-1] = sub
            rows = padded.tolist()
            ys, xs = np.nonzero(padded)
            first = int(np.argmin(ys * padded.shape[1] + xs))
            sy, sx = int(ys[first]), int(xs[first])
            pix = _trace_boundary(rows, sx, sy)
            ox = sl[1].start - 1  # undo padding and slicing
            oy = sl[0].start - 1
            pts = [Point(x + ox + 0.5, y + oy + 0.5) for x, y in pix]
            if len(pts) < 2:
                continue
            pts.append(pts[0])  # boundaries are closed loops
            out.append(Contour(tuple(pts), color))

    out.sort(key=lambda c: ((c.color.r, c.color.g, c.color.b), (c.points[0].y, c.points[0].x)))
    return out


# ---------------------------------------------------------------------------
# simplification


def _distances_to_segment(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    L2 = float(d @ d)
    if L2 <= 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts - a) @ d) / L2, 0.0, 1.0)
    proj = a + t[:, None] * d
    return np.hypot(pts[:, 0] - proj[:, 0], pts[:, 1] - proj[:, 1])


def simplify(contour: Contour, epsilon: float) -> Contour:
    """Douglas-Peucker. Endpoints survive; epsilon 0 returns the input."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0 or len(contour.points) <= 2:
        return contour
    pts = np.asarray(contour.points, dtype=np.float64)
    n = len(pts)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[n - 1] = True
    stack = [(0, n - 1)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        dist = _distances_to_segment(pts[a + 1 : b], pts[a], pts[b])
        imax = int(np.argmax(dist))
        if dist[imax] > epsilon:
            m = a + 1 + imax
            keep[m] = True
            stack.append((a, m))
            stack.append((m, b))
    if contour.closed and int(keep.sum()) < 3:
        # a fully collapsed loop would repeat its endpoint; keep the far point
        far = int(np.argmax(np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])))
        keep[far] = True
    kept = [contour.points[i] for i in range(n) if keep[i]]
    return Contour(tuple(kept), contour.color)


# ---------------------------------------------------------------------------
# cubic fitting


def _bezier_at(b: np.ndarray, u: np.ndarray) -> np.ndarray:
    t = u[:, None]
    s = 1.0 - t
    return (
        b[0] * s * s * s
        + 3.0 * b[1] * s * s * t
        + 3.0 * b[2] * s * t * t
        + b[3] * t * t * t
    )


def _bezier_d1(b: np.ndarray, u: np.ndarray) -> np.ndarray:
    t = u[:, None]
    s = 1.0 - t
    return 3.0 * ((b[1] - b[0]) * s * s + 2.0 * (b[2] - b[1]) * s * t + (b[3] - b[2]) * t * t)


def _bezier_d2(b: np.ndarray, u: np.ndarray) -> np.ndarray:
    t = u[:, None]
    s = 1.0 - t
    return 6.0 * ((b[2] - 2.0 * b[1] + b[0]) * s + (b[3] - 2.0 * b[2] + b[1]) * t)


def _chord_params(pts: np.ndarray) -> np.ndarray:
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    u = np.concatenate(([0.0], np.cumsum(seg)))
    total = u[-1]
    return u / total if total > 0 else np.linspace(0.0, 1.0, len(pts))


def _generate_bezier(
    pts: np.ndarray, u: np.ndarray, lt: np.ndarray, rt: np.ndarray
) -> np.ndarray:
    first, last = pts[0], pts[-1]
    s = 1.0 - u
    b0 = (s * s * s)[:, None]
    b1 = (3.0 * s * s * u)[:, None]
    b2 = (3.0 * s * u * u)[:, None]
    b3 = (u * u * u)[:, None]

    a1 = lt[None, :] * b1
    a2 = rt[None, :] * b2
    c00 = float((a1 * a1).sum())
    c01 = float((a1 * a2).sum())
    c11 = float((a2 * a2).sum())
    rhs = pts - (first * (b0 + b1) + last * (b2 + b3))
    x0 = float((a1 * rhs).sum())
    x1 = float((a2 * rhs).sum())

    det = c00 * c11 - c01 * c01
    alpha_l = alpha_r = 0.0
    if det != 0.0:
        alpha_l = (x0 * c11 - x1 * c01) / det
        alpha_r = (c00 * x1 - c01 * x0) / det

    seg_len = float(np.hypot(*(last - first)))
    eps = 1.0e-6 * seg_len
    if alpha_l < eps or alpha_r < eps or alpha_l > 6.0 * seg_len or alpha_r > 6.0 * seg_len:
        # degenerate least squares answer; fall back to the Wu/Barsky heuristic
        alpha_l = alpha_r = seg_len / 3.0

    return np.array([first, first + lt * alpha_l, last + rt * alpha_r, last])


def _max_fit_error(pts: np.ndarray, bez: np.ndarray, u: np.ndarray) -> tuple[float, int]:
    fitted = _bezier_at(bez, u)
    d = np.hypot(fitted[:, 0] - pts[:, 0], fitted[:, 1] - pts[:, 1])
    interior = d[1:-1]
    if len(interior) == 0:
        return 0.0, len(pts) // 2
    imax = int(np.argmax(interior)) + 1
    return float(d[imax]), imax


def _reparameterize(pts: np.ndarray, bez: np.ndarray, u: np.ndarray) -> np.ndarray:
    q = _bezier_at(bez, u)
    q1 = _bezier_d1(bez, u)
    q2 = _bezier_d2(bez, u)
    diff = q - pts
    num = (diff * q1).sum(axis=1)
    den = (q1 * q1).sum(axis=1) + (diff * q2).sum(axis=1)
    step = np.where(np.abs(den) > 1e-12, num / np.where(den == 0, 1.0, den), 0.0)
    out = u - step
    out[0], out[-1] = 0.0, 1.0
    return np.clip(out, 0.0, 1.0)


def _control_points_sane(bez: np.ndarray, pts: np.ndarray, err: float) -> bool:
    pad = 4.0 * err
    lo = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    return bool((bez >= lo).all() and (bez <= hi).all())


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    return v / n if n > 0 else np.array([1.0, 0.0])


def _fit_run(pts: np.ndarray, max_error: float) -> list[tuple]:
    """Fit one corner-free run. Returns ("line", a, b) and ("cubic", b) items."""
    if len(pts) == 2 or _distances_to_segment(pts[1:-1], pts[0], pts[-1]).max(initial=0.0) <= max_error:
        return [("line", pts[0].copy(), pts[-1].copy())]

    out: list[tuple] = []
    left_tangent = _unit(pts[1] - pts[0])
    right_tangent = _unit(pts[-2] - pts[-1])
    stack = [(0, len(pts) - 1, left_tangent, right_tangent)]
    while stack:
        a, b, lt, rt = stack.pop()
        sub = pts[a : b + 1]
        if len(sub) == 2:
            out.append(("line", sub[0].copy(), sub[1].copy()))
            continue
        u = _chord_params(sub)
        bez = _generate_bezier(sub, u, lt, rt)
        err, split = _max_fit_error(sub, bez, u)
        if err > max_error and err < 4.0 * max_error:
            for _ in range(4):
                u = _reparameterize(sub, bez, u)
                bez = _generate_bezier(sub, u, lt, rt)
                err, split = _max_fit_error(sub, bez, u)
                if err <= max_error:
                    break
        if err <= max_error and _control_points_sane(bez, sub, max_error):
            out.append(("cubic", bez))
            continue
        split = min(max(split, 1), len(sub) - 2)
        center = _unit(sub[split - 1] - sub[split + 1])
        # push right first so the left half is emitted first
        stack.append((a + split, b, -center, rt))
        stack.append((a, a + split, lt, center))
    return out


def fit_curves(
    contour: Contour,
    params: FitParams,
    *,
    stream: Stream = Stream.SKETCH,
    width: float = 1.0,
    filled: bool = False,
    id_start: int = 0,
) -> list[Stroke]:
    """Fit a contour with lines and cubics that chain end to end.

    Corners (turning angle above params.corner_angle_deg) always become
    stroke boundaries. Every contour vertex ends up within params.max_error
    of the fitted chain. Closed contours are fitted as an open run that
    starts and ends at points[0].
    """
    pts = np.asarray(contour.points, dtype=np.float64)
    n = len(pts)

    corner_limit = math.radians(params.corner_angle_deg)
    cuts = [0]
    v = np.diff(pts, axis=0)
    for i in range(1, n - 1):
        cross = v[i - 1, 0] * v[i, 1] - v[i - 1, 1] * v[i, 0]
        dot = float(v[i - 1] @ v[i])
        if math.atan2(abs(cross), dot) > corner_limit:
            cuts.append(i)
    cuts.append(n - 1)

    pieces: list[tuple] = []
    for a, b in zip(cuts, cuts[1:]):
        pieces.extend(_fit_run(pts[a : b + 1], params.max_error))

    strokes: list[Stroke] = []
    sid = id_start
    for piece in pieces:
        if piece[0] == "line":
            _, p0, p1 = piece
            geometry = (Point(*p0), Point(*p1))
            kind = StrokeKind.LINE
        else:
            bez = piece[1]
            geometry = tuple(Point(*row) for row in bez)
            kind = StrokeKind.CUBIC_BEZIER
        strokes.append(
            Stroke(sid, kind, geometry, contour.color, width, stream, filled)
        )
        sid += 1
    return strokes


# ---------------------------------------------------------------------------
# orchestration


def vectorize_raster(
    image: RasterImage,
    params: FitParams,
    stream: Stream,
    *,
    width: float = 1.0,
    id_start: int = 0,
) -> StrokeSet:
    """Full raster-to-strokes conversion for one stream.

    Sketch input is binarized on luminance at 128 before tracing; paint
    input is posterized to params.posterize_levels first.
    """
    if image.width == 0 or image.height == 0:
        raise EmptyImage("empty input image")
    if stream is Stream.SKETCH:
        lum = image.luminance()
        work = gray_image(np.where(lum < 128.0, 0, 255).astype(np.uint8))
    else:
        work = posterize(image, params.posterize_levels)

    strokes: list[Stroke] = []
    next_id = id_start
    for contour in trace_contours(work):
        slim = simplify(contour, params.simplify_epsilon)
        batch = fit_curves(slim, params, stream=stream, width=width, id_start=next_id)
        strokes.extend(batch)
        next_id += len(batch)
    return StrokeSet(tuple(strokes), float(image.width), float(image.height))
