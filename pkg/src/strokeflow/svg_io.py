"""SVG ingestion and emission for a deliberately small subset.

Supported input: an svg root, g containers, and path elements, with
translate/scale transforms and plain paint attributes. Anything else
(text, CSS, gradients, clip paths, general matrices...) raises
UnsupportedFeature: the expectation is that users flatten fancy documents
with their editor before feeding them in.

The emitters write one path element per stroke. Numbers are rounded to six
decimals, which keeps emit -> parse round trips within 1e-6 per coordinate.
"""
from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import BadPathData, MalformedXml, UnsupportedFeature
from .model import (
    ArcSpec,
    Color,
    Point,
    Stream,
    Stroke,
    StrokeKind,
    StrokeSet,
    circular_arc_parameters,
)

# an affine limited to scale + translate: (sx, sy, tx, ty)
Affine = tuple[float, float, float, float]

IDENTITY: Affine = (1.0, 1.0, 0.0, 0.0)


def compose(outer: Affine, inner: Affine) -> Affine:
    osx, osy, otx, oty = outer
    isx, isy, itx, ity = inner
    return (osx * isx, osy * isy, osx * itx + otx, osy * ity + oty)


def apply_affine(t: Affine, p: Point) -> Point:
    sx, sy, tx, ty = t
    return Point(sx * p.x + tx, sy * p.y + ty)


@dataclass(frozen=True)
class PathElement:
    """A path as found in the document, with resolved inheritance."""

    d: str
    transform: Affine
    stroke_paint: str | None
    fill_paint: str | None
    stroke_width: str | None


@dataclass(frozen=True)
class SvgDocument:
    width: float
    height: float
    elements: tuple[PathElement, ...] = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# document reading

_UNIT_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*(px)?\s*$")


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_length(raw: str, what: str) -> float:
    m = _UNIT_RE.match(raw)
    if not m:
        raise UnsupportedFeature(f"{what} value {raw!r}")
    try:
        v = float(m.group(1))
    except ValueError:
        raise UnsupportedFeature(f"{what} value {raw!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise UnsupportedFeature(f"{what} must be positive, got {raw!r}")
    return v


_TRANSFORM_RE = re.compile(r"\s*(\w+)\s*\(([^)]*)\)\s*,?")


def _parse_transform(raw: str) -> Affine:
    acc = IDENTITY
    pos = 0
    while pos < len(raw):
        m = _TRANSFORM_RE.match(raw, pos)
        if not m:
            if raw[pos:].strip():
                raise UnsupportedFeature("transform", raw[pos:].strip())
            break
        name = m.group(1)
        try:
            args = [float(tok) for tok in re.split(r"[\s,]+", m.group(2).strip()) if tok]
        except ValueError:
            raise UnsupportedFeature("transform", m.group(0).strip()) from None
        if name == "translate":
            if len(args) == 1:
                op = (1.0, 1.0, args[0], 0.0)
            elif len(args) == 2:
                op = (1.0, 1.0, args[0], args[1])
            else:
                raise UnsupportedFeature("transform", m.group(0).strip())
        elif name == "scale":
            if len(args) == 1:
                op = (args[0], args[0], 0.0, 0.0)
            elif len(args) == 2:
                op = (args[0], args[1], 0.0, 0.0)
            else:
                raise UnsupportedFeature("transform", m.group(0).strip())
        else:
            raise UnsupportedFeature(f"transform {name}")
        acc = compose(acc, op)
        pos = m.end()
    return acc


_BANNED_ATTRS = ("style", "clip-path", "mask", "filter", "marker-start", "marker-mid", "marker-end")


def _check_attrs(el: ET.Element) -> None:
    for name in _BANNED_ATTRS:
        if el.get(name) is not None:
            raise UnsupportedFeature(name)


def _walk(
    el: ET.Element,
    transform: Affine,
    stroke_paint: str | None,
    fill_paint: str | None,
    stroke_width: str | None,
    out: list[PathElement],
) -> None:
    name = _local_name(el.tag)
    if name not in ("g", "path"):
        raise UnsupportedFeature(f"element <{name}>")
    _check_attrs(el)

    t = el.get("transform")
    if t is not None:
        transform = compose(transform, _parse_transform(t))
    stroke_paint = el.get("stroke", stroke_paint)
    fill_paint = el.get("fill", fill_paint)
    stroke_width = el.get("stroke-width", stroke_width)

    if name == "g":
        for child in el:
            _walk(child, transform, stroke_paint, fill_paint, stroke_width, out)
        return
    d = el.get("d")
    if d is None or not d.strip():
        return
    out.append(PathElement(d, transform, stroke_paint, fill_paint, stroke_width))


def read_document(svg_text: str) -> SvgDocument:
    """Parse the XML shell: dimensions plus the flat list of paths."""
    try:
        root = ET.fromstring(svg_text)
    except ET.ParseError as e:
        raise MalformedXml(f"not well-formed XML: {e}") from None
    if _local_name(root.tag) != "svg":
        raise MalformedXml(f"root element is <{_local_name(root.tag)}>, expected <svg>")
    _check_attrs(root)

    vb = root.get("viewBox")
    vbox = None
    if vb is not None:
        parts = [p for p in re.split(r"[\s,]+", vb.strip()) if p]
        if len(parts) != 4:
            raise MalformedXml(f"bad viewBox {vb!r}")
        try:
            vbox = tuple(float(p) for p in parts)
        except ValueError:
            raise MalformedXml(f"bad viewBox {vb!r}") from None
        if vbox[2] <= 0 or vbox[3] <= 0:
            raise MalformedXml(f"bad viewBox {vb!r}")

    w_attr, h_attr = root.get("width"), root.get("height")
    if w_attr is not None and h_attr is not None:
        width = _parse_length(w_attr, "width")
        height = _parse_length(h_attr, "height")
    elif vbox is not None:
        width, height = vbox[2], vbox[3]
    else:
        raise UnsupportedFeature("svg without width/height or viewBox")

    transform = IDENTITY
    if vbox is not None:
        minx, miny, vw, vh = vbox
        sx, sy = width / vw, height / vh
        transform = (sx, sy, -minx * sx, -miny * sy)

    rt = root.get("transform")
    if rt is not None:
        transform = compose(transform, _parse_transform(rt))

    out: list[PathElement] = []
    for child in root:
        _walk(child, transform, root.get("stroke"), root.get("fill"), root.get("stroke-width"), out)
    return SvgDocument(width, height, tuple(out))


# ---------------------------------------------------------------------------
# paint parsing

_NAMED_COLORS = {
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "red": (255, 0, 0),
    "lime": (0, 255, 0),
    "green": (0, 128, 0),
    "blue": (0, 0, 255),
    "yellow": (255, 255, 0),
    "cyan": (0, 255, 255),
    "aqua": (0, 255, 255),
    "magenta": (255, 0, 255),
    "fuchsia": (255, 0, 255),
    "gray": (128, 128, 128),
    "grey": (128, 128, 128),
    "silver": (192, 192, 192),
    "maroon": (128, 0, 0),
    "olive": (128, 128, 0),
    "navy": (0, 0, 128),
    "purple": (128, 0, 128),
    "teal": (0, 128, 128),
    "orange": (255, 165, 0),
}

_RGB_RE = re.compile(r"^rgb\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


def parse_paint(raw: str) -> Color | None:
    """A paint attribute value to a Color, or None for 'none'."""
    s = raw.strip().lower()
    if s == "none":
        return None
    if s.startswith("#"):
        hexpart = s[1:]
        if len(hexpart) == 3 and all(c in "0123456789abcdef" for c in hexpart):
            return Color(*(int(c * 2, 16) for c in hexpart))
        if len(hexpart) == 6 and all(c in "0123456789abcdef" for c in hexpart):
            return Color(int(hexpart[0:2], 16), int(hexpart[2:4], 16), int(hexpart[4:6], 16))
        raise UnsupportedFeature(f"color {raw!r}")
    m = _RGB_RE.match(s)
    if m:
        vals = [int(v) for v in m.groups()]
        if any(v > 255 for v in vals):
            raise UnsupportedFeature(f"color {raw!r}")
        return Color(*vals)
    if s in _NAMED_COLORS:
        return Color(*_NAMED_COLORS[s])
    if s.startswith("url("):
        raise UnsupportedFeature("paint reference", raw)
    raise UnsupportedFeature(f"color {raw!r}")


# ---------------------------------------------------------------------------
# path data

_SEP_RE = re.compile(r"[ \t\r\n,]*")
_NUM_RE = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_COMMANDS = set("MmLlHhVvQqTtCcSsAaZz")


class _DReader:
    def __init__(self, d: str):
        self.d = d
        self.pos = 0

    def skip_sep(self) -> None:
        self.pos = _SEP_RE.match(self.d, self.pos).end()

    def at_end(self) -> bool:
        self.skip_sep()
        return self.pos >= len(self.d)

    def peek_number(self) -> bool:
        self.skip_sep()
        return _NUM_RE.match(self.d, self.pos) is not None

    def number(self) -> float:
        self.skip_sep()
        m = _NUM_RE.match(self.d, self.pos)
        if not m:
            raise BadPathData("expected a number", self.pos)
        self.pos = m.end()
        v = float(m.group(0))
        if not math.isfinite(v):
            raise BadPathData("non-finite number", m.start())
        return v

    def pair(self) -> tuple[float, float]:
        return self.number(), self.number()

    def flag(self) -> bool:
        self.skip_sep()
        if self.pos >= len(self.d) or self.d[self.pos] not in "01":
            raise BadPathData("expected a 0/1 flag", self.pos)
        ch = self.d[self.pos]
        self.pos += 1
        return ch == "1"


# segment tuples produced by the reader, all in absolute user space:
#   ("line", p0, p1)
#   ("qbc",  p0, c, p1)
#   ("cbc",  p0, c1, c2, p1)
#   ("arc",  p0, p1, rx, ry, rot, large, sweep)
Segment = tuple


def _read_path(d: str) -> list[Segment]:
    r = _DReader(d)
    segs: list[Segment] = []
    cur: Point | None = None
    start: Point | None = None
    prev_cmd = ""
    prev_quad_ctrl: Point | None = None
    prev_cubic_ctrl: Point | None = None

    def need_cur() -> Point:
        if cur is None:
            raise BadPathData("command before any moveto", r.pos)
        return cur

    while True:
        r.skip_sep()
        if r.pos >= len(r.d):
            break
        ch = r.d[r.pos]
        if ch in _COMMANDS:
            cmd = ch
            r.pos += 1
        elif prev_cmd and r.peek_number():
            # implicit repetition; an M/m continues as lineto
            cmd = {"M": "L", "m": "l"}.get(prev_cmd, prev_cmd)
        else:
            raise BadPathData(f"unexpected character {ch!r}", r.pos)

        rel = cmd.islower()
        op = cmd.upper()
        if cur is None and op != "M":
            raise BadPathData("path must begin with a moveto", r.pos)

        if op == "M":
            x, y = r.pair()
            cur = Point(cur.x + x, cur.y + y) if (rel and cur is not None) else Point(x, y)
            start = cur
            prev_quad_ctrl = prev_cubic_ctrl = None
        elif op == "L":
            x, y = r.pair()
            p = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            segs.append(("line", cur, p))
            cur = p
            prev_quad_ctrl = prev_cubic_ctrl = None
        elif op == "H":
            x = r.number()
            p = Point(cur.x + x if rel else x, cur.y)
            segs.append(("line", cur, p))
            cur = p
            prev_quad_ctrl = prev_cubic_ctrl = None
        elif op == "V":
            y = r.number()
            p = Point(cur.x, cur.y + y if rel else y)
            segs.append(("line", cur, p))
            cur = p
            prev_quad_ctrl = prev_cubic_ctrl = None
        elif op in ("Q", "T"):
            if op == "Q":
                cx, cy = r.pair()
                c = Point(cur.x + cx, cur.y + cy) if rel else Point(cx, cy)
            else:
                base = need_cur()
                if prev_cmd.upper() in ("Q", "T") and prev_quad_ctrl is not None:
                    c = Point(2 * base.x - prev_quad_ctrl.x, 2 * base.y - prev_quad_ctrl.y)
                else:
                    c = base
            x, y = r.pair()
            p = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            segs.append(("qbc", cur, c, p))
            cur = p
            prev_quad_ctrl, prev_cubic_ctrl = c, None
        elif op in ("C", "S"):
            if op == "C":
                x1, y1 = r.pair()
                c1 = Point(cur.x + x1, cur.y + y1) if rel else Point(x1, y1)
            else:
                base = need_cur()
                if prev_cmd.upper() in ("C", "S") and prev_cubic_ctrl is not None:
                    c1 = Point(2 * base.x - prev_cubic_ctrl.x, 2 * base.y - prev_cubic_ctrl.y)
                else:
                    c1 = base
            x2, y2 = r.pair()
            c2 = Point(cur.x + x2, cur.y + y2) if rel else Point(x2, y2)
            x, y = r.pair()
            p = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            segs.append(("cbc", cur, c1, c2, p))
            cur = p
            prev_cubic_ctrl, prev_quad_ctrl = c2, None
        elif op == "A":
            rx = r.number()
            ry = r.number()
            rot = r.number()
            large = r.flag()
            sweep = r.flag()
            x, y = r.pair()
            p = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            if p.x == cur.x and p.y == cur.y:
                pass  # identical endpoints: the arc is omitted
            elif rx == 0.0 or ry == 0.0:
                segs.append(("line", cur, p))
            else:
                segs.append(("arc", cur, p, abs(rx), abs(ry), rot, large, sweep))
            cur = p
            prev_quad_ctrl = prev_cubic_ctrl = None
        else:  # Z
            base = need_cur()
            if start is not None and math.hypot(base.x - start.x, base.y - start.y) > 1e-12:
                segs.append(("line", base, start))
            cur = start
            prev_quad_ctrl = prev_cubic_ctrl = None

        prev_cmd = cmd
    return segs


def _transform_segment(seg: Segment, t: Affine) -> Segment:
    sx, sy, _, _ = t
    kind = seg[0]
    if kind == "arc":
        _, p0, p1, rx, ry, rot, large, sweep = seg
        q0, q1 = apply_affine(t, p0), apply_affine(t, p1)
        rot = rot % 360.0
        axis = rot % 180.0
        if axis == 90.0:
            rx, ry = ry, rx
            rot = (rot - 90.0) % 360.0
            axis = 0.0
        if axis == 0.0:
            rx2, ry2 = rx * abs(sx), ry * abs(sy)
        elif abs(sx) == abs(sy):
            rx2, ry2 = rx * abs(sx), ry * abs(sy)
            if sx * sy < 0:
                rot = (-rot) % 360.0
        else:
            raise UnsupportedFeature("non-uniform scale on a rotated arc")
        if sx * sy < 0:
            sweep = not sweep
        return ("arc", q0, q1, rx2, ry2, rot, large, sweep)
    return (kind,) + tuple(apply_affine(t, p) for p in seg[1:])


def _element_strokes(
    el: PathElement, next_id: int, stream: Stream
) -> tuple[list[Stroke], int]:
    stroke_color = parse_paint(el.stroke_paint) if el.stroke_paint is not None else None
    fill_color = parse_paint(el.fill_paint) if el.fill_paint is not None else Color(0, 0, 0)
    width = 1.0
    if el.stroke_width is not None:
        w = _parse_length(el.stroke_width, "stroke-width")
        width = w

    if stroke_color is not None:
        color, filled = stroke_color, False
    elif fill_color is not None:
        color, filled = fill_color, True
    else:
        return [], next_id  # neither painted: invisible

    out: list[Stroke] = []
    for seg in _read_path(el.d):
        seg = _transform_segment(seg, el.transform)
        kind = seg[0]
        if kind == "line":
            s = Stroke(next_id, StrokeKind.LINE, (seg[1], seg[2]), color, width, stream, filled)
        elif kind == "qbc":
            s = Stroke(
                next_id, StrokeKind.QUADRATIC_BEZIER, (seg[1], seg[2], seg[3]), color, width, stream, filled
            )
        elif kind == "cbc":
            s = Stroke(
                next_id,
                StrokeKind.CUBIC_BEZIER,
                (seg[1], seg[2], seg[3], seg[4]),
                color,
                width,
                stream,
                filled,
            )
        else:
            _, p0, p1, rx, ry, rot, large, sweep = seg
            # constructed as elliptical; normalization reclassifies circles
            s = Stroke(
                next_id,
                StrokeKind.ELLIPTICAL_ARC,
                (p0, p0, p1),
                color,
                width,
                stream,
                filled,
                arc=ArcSpec(rx, ry, rot, large, sweep),
            )
        out.append(s)
        next_id += 1
    return out, next_id


def document_to_strokes(
    doc: SvgDocument, *, stream: Stream = Stream.SKETCH, id_start: int = 0
) -> StrokeSet:
    strokes: list[Stroke] = []
    next_id = id_start
    for el in doc.elements:
        batch, next_id = _element_strokes(el, next_id, stream)
        strokes.extend(batch)
    return StrokeSet(tuple(strokes), doc.width, doc.height)


def parse_svg(svg_text: str, *, stream: Stream = Stream.SKETCH, id_start: int = 0) -> StrokeSet:
    """Parse an SVG document into strokes, ids in document order."""
    return document_to_strokes(read_document(svg_text), stream=stream, id_start=id_start)


# ---------------------------------------------------------------------------
# emission


def fmt_num(v: float) -> str:
    """Canonical short decimal used everywhere we print numbers."""
    r = round(float(v), 6)
    if r == 0.0:
        r = 0.0  # squash -0.0
    i = int(r)
    return str(i) if i == r else repr(r)


def _fmt_exact(v: float) -> str:
    # arcs re-derive their center from what we print, which can amplify
    # rounding near a half circle; print the shortest exact representation
    f = float(v)
    if f == 0.0:
        f = 0.0
    i = int(f)
    return str(i) if i == f else repr(f)


def stroke_path_data(stroke: Stroke) -> str:
    pts = stroke.points
    f = fmt_num
    k = stroke.kind
    if k is StrokeKind.LINE:
        return f"M {f(pts[0].x)} {f(pts[0].y)} L {f(pts[1].x)} {f(pts[1].y)}"
    if k is StrokeKind.QUADRATIC_BEZIER:
        return (
            f"M {f(pts[0].x)} {f(pts[0].y)} Q {f(pts[1].x)} {f(pts[1].y)}"
            f" {f(pts[2].x)} {f(pts[2].y)}"
        )
    if k is StrokeKind.CUBIC_BEZIER:
        return (
            f"M {f(pts[0].x)} {f(pts[0].y)} C {f(pts[1].x)} {f(pts[1].y)}"
            f" {f(pts[2].x)} {f(pts[2].y)} {f(pts[3].x)} {f(pts[3].y)}"
        )
    e = _fmt_exact
    if k is StrokeKind.CIRCULAR_ARC:
        params = circular_arc_parameters(*pts)
        assert params is not None
        _, _, radius, _, delta = params
        large = "1" if abs(delta) > math.pi else "0"
        sweep = "1" if delta > 0 else "0"
        return (
            f"M {e(pts[0].x)} {e(pts[0].y)} A {e(radius)} {e(radius)} 0 {large} {sweep}"
            f" {e(pts[2].x)} {e(pts[2].y)}"
        )
    spec = stroke.arc
    assert spec is not None
    return (
        f"M {e(pts[0].x)} {e(pts[0].y)} A {e(spec.rx)} {e(spec.ry)} {e(spec.rotation_deg)}"
        f" {int(spec.large_arc)} {int(spec.sweep)} {e(pts[2].x)} {e(pts[2].y)}"
    )


def _paint_attrs(stroke: Stroke) -> str:
    if stroke.filled:
        return f'fill="{stroke.color.css()}" stroke="none" stroke-width="{fmt_num(stroke.width)}"'
    return f'fill="none" stroke="{stroke.color.css()}" stroke-width="{fmt_num(stroke.width)}"'


def _svg_header(width: float, height: float) -> str:
    return (
        '<svg xmlns="http://www.w3.org/2000/svg"'
        f' width="{fmt_num(width)}" height="{fmt_num(height)}"'
        f' viewBox="0 0 {fmt_num(width)} {fmt_num(height)}">'
    )


def emit_static_svg(stroke_set: StrokeSet) -> str:
    """All strokes, visible at once, one path element per stroke."""
    lines = [_svg_header(stroke_set.canvas_width, stroke_set.canvas_height)]
    for s in stroke_set.strokes:
        lines.append(f'  <path d="{stroke_path_data(s)}" {_paint_attrs(s)}/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_animated_svg(seq, stroke_set: StrokeSet, seconds_per_stroke: float) -> str:
    """Strokes fading in one by one, ordered by sequence rank.

    ``seq`` may be a per-stream sequence or a global one; anything exposing
    ordered (stroke_id, rank) pairs via iter_ranked() works.
    """
    if not (seconds_per_stroke > 0):
        raise ValueError("seconds_per_stroke must be positive")
    index = stroke_set.by_id()
    lines = [_svg_header(stroke_set.canvas_width, stroke_set.canvas_height)]
    for stroke_id, rank in seq.iter_ranked():
        s = index[stroke_id]
        begin = fmt_num(rank * seconds_per_stroke)
        dur = fmt_num(seconds_per_stroke)
        lines.append(f'  <path d="{stroke_path_data(s)}" {_paint_attrs(s)} opacity="0">')
        lines.append(
            f'    <animate attributeName="opacity" from="0" to="1"'
            f' begin="{begin}s" dur="{dur}s" fill="freeze"/>'
        )
        lines.append("  </path>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
