"""Stroke primitives: points, colors, the five curve kinds, and stroke sets.

Everything here is immutable. Strokes normalize themselves at construction
time so the rest of the pipeline can rely on a canonical form:

* a circular arc whose three points are collinear (cross product within
  1e-9) becomes a plain line,
* a circular arc's interior point is snapped to the angular midpoint of
  the arc, which makes SVG emission lossless,
* an elliptical arc with equal radii (after SVG radius correction) becomes
  a circular arc, and one with a zero radius collapses to a line.

No third-party imports on purpose; this module is plain math.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Sequence

from .errors import InvalidStroke

TWO_PI = 2.0 * math.pi

# Cross-product tolerance below which three arc points count as collinear.
COLLINEAR_EPS = 1e-9


class Stream(Enum):
    SKETCH = "sketch"
    PAINT = "paint"


class StrokeKind(Enum):
    LINE = "line"
    QUADRATIC_BEZIER = "qbc"
    CUBIC_BEZIER = "cbc"
    CIRCULAR_ARC = "carc"
    ELLIPTICAL_ARC = "earc"


# How many control points each kind carries. Arcs use a three point view:
# start, a point on the arc, end.
ARITY = {
    StrokeKind.LINE: 2,
    StrokeKind.QUADRATIC_BEZIER: 3,
    StrokeKind.CUBIC_BEZIER: 4,
    StrokeKind.CIRCULAR_ARC: 3,
    StrokeKind.ELLIPTICAL_ARC: 3,
}


class Point(NamedTuple):
    x: float
    y: float


class Color(NamedTuple):
    r: int
    g: int
    b: int

    def css(self) -> str:
        return "#{:02x}{:02x}{:02x}".format(self.r, self.g, self.b)

    @property
    def is_gray(self) -> bool:
        return self.r == self.g == self.b


class ArcSpec(NamedTuple):
    """SVG-style elliptical arc parameters (endpoint form)."""

    rx: float
    ry: float
    rotation_deg: float
    large_arc: bool
    sweep: bool


# ---------------------------------------------------------------------------
# geometry helpers


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the closed segment a-b."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 <= 0.0:
        return math.hypot(p.x - ax, p.y - ay)
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / seg2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(p.x - (ax + t * dx), p.y - (ay + t * dy))


def circumcircle(a: Point, b: Point, c: Point) -> tuple[float, float, float] | None:
    """Center and radius of the circle through three points.

    Returns None when the points are collinear within COLLINEAR_EPS
    (cross product of b-a and c-a).
    """
    abx, aby = b.x - a.x, b.y - a.y
    acx, acy = c.x - a.x, c.y - a.y
    cross = abx * acy - aby * acx
    if abs(cross) <= COLLINEAR_EPS:
        return None
    d = 2.0 * cross
    ab2 = abx * abx + aby * aby
    ac2 = acx * acx + acy * acy
    ux = (acy * ab2 - aby * ac2) / d
    uy = (abx * ac2 - acx * ab2) / d
    cx, cy = a.x + ux, a.y + uy
    return cx, cy, math.hypot(ux, uy)


def circular_arc_parameters(
    start: Point, mid: Point, end: Point
) -> tuple[float, float, float, float, float] | None:
    """(cx, cy, r, theta_start, delta_theta) for the arc start->end through mid.

    delta_theta is signed: positive means increasing angle (counterclockwise
    in a y-up frame, clockwise on screen). None when collinear.
    """
    circ = circumcircle(start, mid, end)
    if circ is None:
        return None
    cx, cy, r = circ
    ts = math.atan2(start.y - cy, start.x - cx)
    tm = math.atan2(mid.y - cy, mid.x - cx)
    te = math.atan2(end.y - cy, end.x - cx)
    fwd_m = (tm - ts) % TWO_PI
    fwd_e = (te - ts) % TWO_PI
    if fwd_e == 0.0:
        # start and end at the same angle; the arc is a (near) full loop
        delta = TWO_PI if fwd_m > 0.0 else -TWO_PI
    elif fwd_m <= fwd_e:
        delta = fwd_e
    else:
        delta = fwd_e - TWO_PI
    return cx, cy, r, ts, delta


def ellipse_point(
    cx: float, cy: float, rx: float, ry: float, phi: float, theta: float
) -> Point:
    cosp, sinp = math.cos(phi), math.sin(phi)
    ex = rx * math.cos(theta)
    ey = ry * math.sin(theta)
    return Point(cx + cosp * ex - sinp * ey, cy + sinp * ex + cosp * ey)


def ellipse_center_parameters(
    start: Point, end: Point, arc: ArcSpec
) -> tuple[float, float, float, float, float, float]:
    """Convert an endpoint-form arc to center form.

    Follows the conversion in the SVG 1.1 implementation notes (F.6.5),
    including the out-of-range radius correction (F.6.6). Returns
    (cx, cy, rx, ry, theta1, delta_theta) with the possibly scaled radii.
    """
    rx, ry = abs(arc.rx), abs(arc.ry)
    if rx == 0.0 or ry == 0.0:
        raise ValueError("zero arc radius")
    phi = math.radians(arc.rotation_deg)
    cosp, sinp = math.cos(phi), math.sin(phi)
    hx = (start.x - end.x) / 2.0
    hy = (start.y - end.y) / 2.0
    x1p = cosp * hx + sinp * hy
    y1p = -sinp * hx + cosp * hy

    lam = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry)
    if lam > 1.0:
        s = math.sqrt(lam)
        rx *= s
        ry *= s

    rx2, ry2 = rx * rx, ry * ry
    num = rx2 * ry2 - rx2 * y1p * y1p - ry2 * x1p * x1p
    den = rx2 * y1p * y1p + ry2 * x1p * x1p
    if den == 0.0:
        # start == end; center form is ill-defined
        raise ValueError("degenerate arc endpoints")
    coef = math.sqrt(max(0.0, num / den))
    if arc.large_arc == arc.sweep:
        coef = -coef
    cxp = coef * rx * y1p / ry
    cyp = -coef * ry * x1p / rx

    cx = cosp * cxp - sinp * cyp + (start.x + end.x) / 2.0
    cy = sinp * cxp + cosp * cyp + (start.y + end.y) / 2.0

    theta1 = math.atan2((y1p - cyp) / ry, (x1p - cxp) / rx)
    theta2 = math.atan2((-y1p - cyp) / ry, (-x1p - cxp) / rx)
    delta = theta2 - theta1
    if not arc.sweep and delta > 0.0:
        delta -= TWO_PI
    elif arc.sweep and delta < 0.0:
        delta += TWO_PI
    return cx, cy, rx, ry, theta1, delta


# ---------------------------------------------------------------------------
# strokes


@dataclass(frozen=True)
class Stroke:
    """One drawable curve with identity, geometry and appearance.

    ``points`` is the control point view; its meaning depends on ``kind``.
    For elliptical arcs the authoritative geometry is ``arc`` plus the two
    endpoints, and points[1] is a derived on-curve sample kept for anchor
    and bounding purposes.
    """

    id: int
    kind: StrokeKind
    points: tuple[Point, ...]
    color: Color
    width: float
    stream: Stream = Stream.SKETCH
    filled: bool = False
    arc: ArcSpec | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, int) or isinstance(self.id, bool) or self.id < 0:
            raise InvalidStroke(f"stroke id must be a non-negative integer, got {self.id!r}")
        if not isinstance(self.kind, StrokeKind):
            raise InvalidStroke(f"bad stroke kind {self.kind!r}")
        if not isinstance(self.stream, Stream):
            raise InvalidStroke(f"bad stream tag {self.stream!r}")

        pts = tuple(Point(float(p[0]), float(p[1])) for p in self.points)
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvalidStroke(f"non-finite coordinate in stroke {self.id}")
        object.__setattr__(self, "points", pts)

        if not (isinstance(self.width, (int, float)) and math.isfinite(self.width) and self.width > 0):
            raise InvalidStroke(f"stroke {self.id}: width must be finite and > 0")
        object.__setattr__(self, "width", float(self.width))

        c = self.color
        if not (isinstance(c, tuple) and len(c) == 3):
            raise InvalidStroke(f"stroke {self.id}: bad color {c!r}")
        r, g, b = (int(v) for v in c)
        if not all(0 <= v <= 255 for v in (r, g, b)):
            raise InvalidStroke(f"stroke {self.id}: color channels out of range")
        object.__setattr__(self, "color", Color(r, g, b))

        if len(pts) != ARITY[self.kind]:
            raise InvalidStroke(
                f"stroke {self.id}: {self.kind.value} needs {ARITY[self.kind]} points, got {len(pts)}"
            )
        if self.kind is StrokeKind.ELLIPTICAL_ARC:
            self._normalize_elliptical()
        if self.kind is StrokeKind.CIRCULAR_ARC:
            self._normalize_circular()
        if self.kind is not StrokeKind.ELLIPTICAL_ARC and self.arc is not None:
            object.__setattr__(self, "arc", None)

    def _demote_to_line(self) -> None:
        pts = self.points
        object.__setattr__(self, "kind", StrokeKind.LINE)
        object.__setattr__(self, "points", (pts[0], pts[-1]))
        object.__setattr__(self, "arc", None)

    def _normalize_circular(self) -> None:
        s, m, e = self.points
        params = circular_arc_parameters(s, m, e)
        if params is None:
            self._demote_to_line()
            return
        cx, cy, r, ts, delta = params
        tm = ts + delta / 2.0
        mid = Point(cx + r * math.cos(tm), cy + r * math.sin(tm))
        object.__setattr__(self, "points", (s, mid, e))

    def _normalize_elliptical(self) -> None:
        if self.arc is None:
            raise InvalidStroke(f"stroke {self.id}: elliptical arc lacks arc parameters")
        s, _, e = self.points
        spec = self.arc
        if abs(spec.rx) == 0.0 or abs(spec.ry) == 0.0 or (s.x == e.x and s.y == e.y):
            self._demote_to_line()
            return
        cx, cy, rx, ry, t1, delta = ellipse_center_parameters(s, e, spec)
        if rx == ry:
            # a circle in disguise; reclassify
            mid = ellipse_point(cx, cy, rx, ry, math.radians(spec.rotation_deg), t1 + delta / 2.0)
            object.__setattr__(self, "kind", StrokeKind.CIRCULAR_ARC)
            object.__setattr__(self, "points", (s, mid, e))
            object.__setattr__(self, "arc", None)
            return
        mid = ellipse_point(cx, cy, rx, ry, math.radians(spec.rotation_deg), t1 + delta / 2.0)
        object.__setattr__(self, "points", (s, mid, e))
        object.__setattr__(
            self,
            "arc",
            ArcSpec(rx, ry, float(spec.rotation_deg), bool(spec.large_arc), bool(spec.sweep)),
        )

    @property
    def anchor(self) -> Point:
        return self.points[0]

    @property
    def endpoint(self) -> Point:
        return self.points[-1]


def anchor(stroke: Stroke) -> Point:
    """The stroke's representative point: its first control point."""
    return stroke.points[0]


# ---------------------------------------------------------------------------
# flattening


def _flat_quad(tol: float, p0: Point, p1: Point, p2: Point, out: list[Point], depth: int) -> None:
    if depth >= 48 or point_segment_distance(p1, p0, p2) <= tol:
        out.append(p2)
        return
    # de Casteljau split at t = 1/2
    q0 = Point((p0.x + p1.x) / 2, (p0.y + p1.y) / 2)
    q1 = Point((p1.x + p2.x) / 2, (p1.y + p2.y) / 2)
    m = Point((q0.x + q1.x) / 2, (q0.y + q1.y) / 2)
    _flat_quad(tol, p0, q0, m, out, depth + 1)
    _flat_quad(tol, m, q1, p2, out, depth + 1)


def _flat_cubic(
    tol: float, p0: Point, p1: Point, p2: Point, p3: Point, out: list[Point], depth: int
) -> None:
    d = max(point_segment_distance(p1, p0, p3), point_segment_distance(p2, p0, p3))
    if depth >= 48 or d <= tol:
        out.append(p3)
        return
    q0 = Point((p0.x + p1.x) / 2, (p0.y + p1.y) / 2)
    q1 = Point((p1.x + p2.x) / 2, (p1.y + p2.y) / 2)
    q2 = Point((p2.x + p3.x) / 2, (p2.y + p3.y) / 2)
    r0 = Point((q0.x + q1.x) / 2, (q0.y + q1.y) / 2)
    r1 = Point((q1.x + q2.x) / 2, (q1.y + q2.y) / 2)
    m = Point((r0.x + r1.x) / 2, (r0.y + r1.y) / 2)
    _flat_cubic(tol, p0, q0, r0, m, out, depth + 1)
    _flat_cubic(tol, m, r1, q2, p3, out, depth + 1)


def _arc_step_count(radius: float, delta: float, tol: float) -> int:
    # chord sagitta r * (1 - cos(a/2)) <= tol gives the widest usable step
    if radius <= tol:
        alpha = math.pi
    else:
        alpha = 2.0 * math.acos(max(-1.0, 1.0 - tol / radius))
        alpha = min(alpha, math.pi)
    if alpha <= 0.0:
        alpha = 1e-3
    return max(1, math.ceil(abs(delta) / alpha))


def flatten(stroke: Stroke, tolerance: float) -> list[Point]:
    """Approximate the stroke by a polyline within ``tolerance``.

    The first and last output points are exactly points[0] and the stroke's
    endpoint; interior samples are spaced so the polyline stays within the
    tolerance of the true curve.
    """
    if not (tolerance > 0.0):
        raise ValueError("flatten tolerance must be positive")
    pts = stroke.points
    kind = stroke.kind
    if kind is StrokeKind.LINE:
        return [pts[0], pts[1]]
    if kind is StrokeKind.QUADRATIC_BEZIER:
        out = [pts[0]]
        _flat_quad(tolerance, pts[0], pts[1], pts[2], out, 0)
        return out
    if kind is StrokeKind.CUBIC_BEZIER:
        out = [pts[0]]
        _flat_cubic(tolerance, pts[0], pts[1], pts[2], pts[3], out, 0)
        return out
    if kind is StrokeKind.CIRCULAR_ARC:
        params = circular_arc_parameters(*pts)
        if params is None:  # cannot happen after normalization, kept defensive
            return [pts[0], pts[2]]
        cx, cy, r, ts, delta = params
        n = _arc_step_count(r, delta, tolerance)
        out = [pts[0]]
        for i in range(1, n):
            t = ts + delta * i / n
            out.append(Point(cx + r * math.cos(t), cy + r * math.sin(t)))
        out.append(pts[2])
        return out
    # elliptical arc
    assert stroke.arc is not None
    cx, cy, rx, ry, t1, delta = ellipse_center_parameters(pts[0], pts[2], stroke.arc)
    phi = math.radians(stroke.arc.rotation_deg)
    n = _arc_step_count(max(rx, ry), delta, tolerance)
    out = [pts[0]]
    for i in range(1, n):
        out.append(ellipse_point(cx, cy, rx, ry, phi, t1 + delta * i / n))
    out.append(pts[2])
    return out


# ---------------------------------------------------------------------------
# stroke sets


@dataclass(frozen=True)
class StrokeSet:
    """An immutable collection of strokes plus the canvas they live on.

    Stroke ids must be unique and all control points must stay within the
    canvas extended by a 10 percent margin on each side (curve fitting may
    overshoot slightly, anything further out is treated as corrupt input).
    """

    strokes: tuple[Stroke, ...]
    canvas_width: float
    canvas_height: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "strokes", tuple(self.strokes))
        w, h = self.canvas_width, self.canvas_height
        if not (math.isfinite(w) and math.isfinite(h) and w > 0 and h > 0):
            raise InvalidStroke(f"bad canvas size {w!r} x {h!r}")
        object.__setattr__(self, "canvas_width", float(w))
        object.__setattr__(self, "canvas_height", float(h))

        seen: set[int] = set()
        xlo, xhi = -0.1 * w, 1.1 * w
        ylo, yhi = -0.1 * h, 1.1 * h
        for s in self.strokes:
            if not isinstance(s, Stroke):
                raise InvalidStroke(f"not a stroke: {s!r}")
            if s.id in seen:
                raise InvalidStroke(f"duplicate stroke id {s.id}")
            seen.add(s.id)
            for p in s.points:
                if not (xlo <= p.x <= xhi and ylo <= p.y <= yhi):
                    raise InvalidStroke(
                        f"stroke {s.id} leaves the canvas margin: ({p.x}, {p.y})"
                    )

    def __len__(self) -> int:
        return len(self.strokes)

    def __iter__(self) -> Iterator[Stroke]:
        return iter(self.strokes)

    def by_id(self) -> dict[int, Stroke]:
        return {s.id: s for s in self.strokes}

    def sorted_by_id(self) -> tuple[Stroke, ...]:
        return tuple(sorted(self.strokes, key=lambda s: s.id))


def merge_sets(a: StrokeSet, b: StrokeSet) -> StrokeSet:
    """Union of two stroke sets over the same canvas."""
    if (a.canvas_width, a.canvas_height) != (b.canvas_width, b.canvas_height):
        raise InvalidStroke("cannot merge stroke sets with different canvases")
    return StrokeSet(a.strokes + b.strokes, a.canvas_width, a.canvas_height)
