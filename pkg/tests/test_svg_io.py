"""SVG subset reader/writer: path grammar, transforms, paints, round-trips."""
import math
import random
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from strokeflow import (
    BadPathData,
    Color,
    GlobalSequence,
    MalformedXml,
    Point,
    SeqEntry,
    Stream,
    Stroke,
    StrokeFlowError,
    StrokeKind,
    StrokeSequence,
    StrokeSet,
    UnsupportedFeature,
    emit_animated_svg,
    emit_static_svg,
    parse_svg,
)
from strokeflow.svg_io import fmt_num, read_document

BLACK = Color(0, 0, 0)


def doc(body, width=100, height=100, extra=""):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}"{extra}>{body}</svg>'
    )


def one_path(d, attrs='stroke="#000000"'):
    return doc(f'<path d="{d}" {attrs}/>')


def circumcenter(p0, p1, p2):
    m = np.array(
        [[p1.x - p0.x, p1.y - p0.y], [p2.x - p1.x, p2.y - p1.y]], dtype=float
    )
    rhs = np.array(
        [
            (p1.x**2 - p0.x**2 + p1.y**2 - p0.y**2) / 2.0,
            (p2.x**2 - p1.x**2 + p2.y**2 - p1.y**2) / 2.0,
        ]
    )
    return np.linalg.solve(m, rhs)


# -------------------------------------------------------------------- parsing


def test_parse_line():
    ss = parse_svg(one_path("M 0 0 L 10 0"))
    assert len(ss) == 1
    s = ss.strokes[0]
    assert s.kind is StrokeKind.LINE
    assert s.points == (Point(0.0, 0.0), Point(10.0, 0.0))
    assert s.color == BLACK


def test_parse_quadratic():
    ss = parse_svg(one_path("M 0 0 Q 5 10 10 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.QUADRATIC_BEZIER
    assert s.points == (Point(0.0, 0.0), Point(5.0, 10.0), Point(10.0, 0.0))


def test_parse_half_circle_arc_center():
    # chord length 10 equals the diameter, so the center must sit at (5,0)
    ss = parse_svg(one_path("M 0 0 A 5 5 0 0 1 10 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.CIRCULAR_ARC
    assert s.points[0] == Point(0.0, 0.0)
    assert s.points[2] == Point(10.0, 0.0)
    c = circumcenter(*s.points)
    assert c[0] == pytest.approx(5.0, abs=1e-9)
    assert c[1] == pytest.approx(0.0, abs=1e-9)


def test_parse_cubic_and_relative():
    ss = parse_svg(one_path("m 1 2 c 1 1 2 1 3 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.CUBIC_BEZIER
    assert s.points == (
        Point(1.0, 2.0),
        Point(2.0, 3.0),
        Point(3.0, 3.0),
        Point(4.0, 2.0),
    )


def test_parse_h_v_z():
    ss = parse_svg(one_path("M 0 0 H 10 V 10 Z"))
    kinds = [s.kind for s in ss.strokes]
    assert kinds == [StrokeKind.LINE] * 3
    assert ss.strokes[2].points == (Point(10.0, 10.0), Point(0.0, 0.0))


def test_z_with_negligible_gap_emits_no_stroke():
    ss = parse_svg(one_path("M 0 0 L 10 0 L 0 0 Z"))
    assert len(ss) == 2


def test_implicit_repetition():
    # a moveto's extra coordinate pairs are implicit linetos
    ss = parse_svg(one_path("M 0 0 5 0 5 5"))
    assert [s.kind for s in ss.strokes] == [StrokeKind.LINE, StrokeKind.LINE]
    assert ss.strokes[1].points == (Point(5.0, 0.0), Point(5.0, 5.0))


def test_smooth_quadratic_reflection():
    ss = parse_svg(one_path("M 0 0 Q 5 10 10 0 T 20 0"))
    second = ss.strokes[1]
    assert second.kind is StrokeKind.QUADRATIC_BEZIER
    # control reflects (5,10) about the previous endpoint (10,0)
    assert second.points[1] == Point(15.0, -10.0)
    assert second.points[2] == Point(20.0, 0.0)


def test_smooth_cubic_reflection():
    ss = parse_svg(one_path("M 0 0 C 1 2 3 2 4 0 S 7 -2 8 0"))
    second = ss.strokes[1]
    assert second.kind is StrokeKind.CUBIC_BEZIER
    assert second.points[1] == Point(5.0, -2.0)  # reflection of (3,2) about (4,0)


def test_smooth_after_non_curve_uses_current_point():
    ss = parse_svg(one_path("M 0 0 L 4 0 T 8 0"))
    second = ss.strokes[1]
    # no preceding Q/T, so the reflected control collapses onto the
    # current point (4,0)
    assert second.kind is StrokeKind.QUADRATIC_BEZIER
    assert second.points[1] == Point(4.0, 0.0)


def test_unspaced_arc_flags():
    # flags are single characters and need no separators after them
    ss = parse_svg(one_path("M 0 0 A 5 5 0 0110 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.CIRCULAR_ARC
    assert s.points[2] == Point(10.0, 0.0)


def test_arc_zero_radius_is_line():
    ss = parse_svg(one_path("M 0 0 A 0 5 0 0 1 10 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.LINE


def test_arc_radius_correction_scales_up():
    # rx=ry=1 cannot span a chord of length 10; radii scale up to 5
    ss = parse_svg(one_path("M 0 0 A 1 1 0 0 1 10 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.CIRCULAR_ARC
    c = circumcenter(*s.points)
    r = math.hypot(s.points[0].x - c[0], s.points[0].y - c[1])
    assert r == pytest.approx(5.0, rel=1e-9)


def test_rotated_elliptical_arc():
    ss = parse_svg(one_path("M 0 0 A 8 4 30 0 1 10 0"))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.ELLIPTICAL_ARC
    assert s.arc is not None
    assert s.arc.rotation_deg == pytest.approx(30.0)
    assert s.points[0] == Point(0.0, 0.0)
    assert s.points[2] == Point(10.0, 0.0)


def test_document_order_is_id_order():
    ss = parse_svg(one_path("M 0 0 L 1 0 L 2 0 Q 3 1 4 0"))
    assert [s.id for s in ss.strokes] == [0, 1, 2]


# ------------------------------------------------------------------ transforms


def test_translate_scale_transform():
    body = (
        '<g transform="translate(10 20)">'
        '<g transform="scale(2)"><path d="M 1 1 L 2 1" stroke="#000"/></g></g>'
    )
    ss = parse_svg(doc(body))
    (s,) = ss.strokes
    assert s.points == (Point(12.0, 22.0), Point(14.0, 22.0))


def test_viewbox_mapping():
    svg = (
        '<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100" '
        'viewBox="0 0 100 50"><path d="M 10 10 L 20 10" stroke="#000"/></svg>'
    )
    ss = parse_svg(svg)
    (s,) = ss.strokes
    assert s.points == (Point(20.0, 20.0), Point(40.0, 20.0))
    assert ss.canvas_width == 200.0


def test_scale_on_circular_arc_keeps_kind():
    body = '<g transform="scale(3)"><path d="M 0 0 A 5 5 0 0 0 10 0" stroke="#000"/></g>'
    ss = parse_svg(doc(body, width=120, height=120))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.CIRCULAR_ARC
    c = circumcenter(*s.points)
    r = math.hypot(s.points[0].x - c[0], s.points[0].y - c[1])
    assert r == pytest.approx(15.0, rel=1e-9)


def test_nonuniform_scale_turns_circle_into_ellipse():
    body = '<g transform="scale(2 1)"><path d="M 0 0 A 5 5 0 0 1 10 0" stroke="#000"/></g>'
    ss = parse_svg(doc(body))
    (s,) = ss.strokes
    assert s.kind is StrokeKind.ELLIPTICAL_ARC
    assert s.points[2] == Point(20.0, 0.0)


def test_rotated_ellipse_under_nonuniform_scale_rejected():
    body = '<g transform="scale(2 1)"><path d="M 0 0 A 8 4 30 0 1 10 0" stroke="#000"/></g>'
    with pytest.raises(UnsupportedFeature):
        parse_svg(doc(body))


# ---------------------------------------------------------------------- paints


def test_paint_priority_stroke_over_fill():
    body = '<path d="M 0 0 L 1 0" stroke="#ff0000" fill="#00ff00"/>'
    (s,) = parse_svg(doc(body)).strokes
    assert s.color == Color(255, 0, 0)
    assert not s.filled


def test_fill_only_marks_filled():
    body = '<path d="M 0 0 L 10 0 L 10 10 Z" fill="#0000ff" stroke="none"/>'
    ss = parse_svg(doc(body))
    assert len(ss) == 3
    assert all(s.filled for s in ss)
    assert all(s.color == Color(0, 0, 255) for s in ss)


def test_default_paint_is_black_fill():
    (s,) = parse_svg(doc('<path d="M 0 0 L 1 0"/>')).strokes
    assert s.color == BLACK
    assert s.filled


def test_invisible_path_skipped():
    body = '<path d="M 0 0 L 1 0" stroke="none" fill="none"/>'
    assert len(parse_svg(doc(body))) == 0


@pytest.mark.parametrize(
    "raw,rgb",
    [
        ("#1a2B3c", (26, 43, 60)),
        ("#fff", (255, 255, 255)),
        ("rgb(1, 2, 3)", (1, 2, 3)),
        ("red", (255, 0, 0)),
        ("teal", (0, 128, 128)),
    ],
)
def test_color_forms(raw, rgb):
    (s,) = parse_svg(doc(f'<path d="M 0 0 L 1 0" stroke="{raw}"/>')).strokes
    assert s.color == Color(*rgb)


def test_stroke_width_parsed_and_defaulted():
    (s,) = parse_svg(
        doc('<path d="M 0 0 L 1 0" stroke="#000" stroke-width="2.5"/>')
    ).strokes
    assert s.width == 2.5
    (s,) = parse_svg(doc('<path d="M 0 0 L 1 0" stroke="#000"/>')).strokes
    assert s.width == 1.0


# ---------------------------------------------------------------------- errors


def test_malformed_xml():
    with pytest.raises(MalformedXml):
        read_document("<svg width='10' height='10'><path")
    with pytest.raises(MalformedXml):
        read_document("just text, no markup at all")


def test_non_svg_root_rejected():
    with pytest.raises(MalformedXml):
        read_document('<html xmlns="x" width="1" height="1"></html>')


def test_unknown_element_rejected():
    with pytest.raises(UnsupportedFeature):
        parse_svg(doc("<rect x='0' y='0' width='5' height='5'/>"))


def test_style_attribute_rejected():
    with pytest.raises(UnsupportedFeature):
        parse_svg(doc('<path d="M 0 0 L 1 0" style="stroke:#000"/>'))


def test_missing_dimensions_rejected():
    with pytest.raises(UnsupportedFeature):
        read_document('<svg xmlns="http://www.w3.org/2000/svg"><path d="M 0 0 L 1 0"/></svg>')


def test_percent_length_rejected():
    with pytest.raises(UnsupportedFeature):
        read_document(
            '<svg xmlns="http://www.w3.org/2000/svg" width="100%" height="10">'
            "</svg>"
        )


def test_url_paint_rejected():
    with pytest.raises(UnsupportedFeature):
        parse_svg(doc('<path d="M 0 0 L 1 0" stroke="url(#grad)"/>'))


def test_path_without_moveto():
    with pytest.raises(BadPathData):
        parse_svg(one_path("L 10 0"))


def test_bad_path_reports_position():
    try:
        parse_svg(one_path("M 0 0 L 10"))
    except BadPathData as e:
        assert e.position is not None
    else:
        pytest.fail("expected BadPathData")


def test_unknown_command_letter():
    with pytest.raises(BadPathData):
        parse_svg(one_path("M 0 0 X 3 4"))


def test_reader_totality_on_noise():
    """Arbitrary junk must raise a library error, never anything else."""
    rng = random.Random(20260816)
    for _ in range(300):
        n = rng.randrange(0, 120)
        junk = "".join(chr(rng.randrange(32, 127)) for _ in range(n))
        try:
            read_document(junk)
        except StrokeFlowError:
            pass


def test_path_data_totality_on_noise():
    rng = random.Random(4711)
    alphabet = "MLQCAZmlqcaz0123456789a.,- \t"
    for _ in range(500):
        d = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 60)))
        try:
            parse_svg(one_path(d))
        except StrokeFlowError:
            pass


# -------------------------------------------------------------------- emitting


def test_emit_empty_set():
    svg = emit_static_svg(StrokeSet((), 100, 100))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert root.get("width") == "100"
    assert root.get("height") == "100"
    assert len(root.findall(".//{*}path")) == 0


def test_emit_single_line():
    s = Stroke(0, StrokeKind.LINE, (Point(0, 0), Point(10, 0)), BLACK, 2.0)
    svg = emit_static_svg(StrokeSet((s,), 100, 100))
    root = ET.fromstring(svg)
    (path,) = root.findall(".//{*}path")
    assert path.get("d") == "M 0 0 L 10 0"
    assert path.get("stroke") == "#000000"
    assert path.get("stroke-width") == "2"
    assert path.get("fill") == "none"


def test_fmt_num():
    assert fmt_num(10.0) == "10"
    assert fmt_num(-0.0) == "0"
    assert fmt_num(2.5) == "2.5"
    assert fmt_num(1 / 3) == "0.333333"
    rng = random.Random(3)
    for _ in range(200):
        v = rng.uniform(-1e4, 1e4)
        assert abs(float(fmt_num(v)) - v) <= 1e-6


def rand_stroke(sid, rng):
    kind = rng.choice(
        [
            StrokeKind.LINE,
            StrokeKind.QUADRATIC_BEZIER,
            StrokeKind.CUBIC_BEZIER,
            StrokeKind.CIRCULAR_ARC,
        ]
    )
    pts = [
        Point(round(rng.uniform(5, 95), 3), round(rng.uniform(5, 95), 3))
        for _ in range(4)
    ]
    color = Color(rng.randrange(256), rng.randrange(256), rng.randrange(256))
    width = round(rng.uniform(0.5, 4.0), 2)
    arity = {
        StrokeKind.LINE: 2,
        StrokeKind.QUADRATIC_BEZIER: 3,
        StrokeKind.CUBIC_BEZIER: 4,
        StrokeKind.CIRCULAR_ARC: 3,
    }[kind]
    try:
        s = Stroke(sid, kind, tuple(pts[:arity]), color, width)
    except StrokeFlowError:
        return None
    # arc normalization can move the interior point far off-canvas
    if any(not (-10 <= p.x <= 110 and -10 <= p.y <= 110) for p in s.points):
        return None
    return s


def test_emit_parse_round_trip():
    rng = random.Random(12)
    strokes = []
    while len(strokes) < 40:
        s = rand_stroke(len(strokes), rng)
        if s is not None:
            strokes.append(s)
    original = StrokeSet(tuple(strokes), 100, 100)
    back = parse_svg(emit_static_svg(original))
    assert len(back) == len(original)
    for a, b in zip(original.strokes, back.strokes):
        assert a.kind == b.kind
        assert a.color == b.color
        assert not b.filled
        assert b.width == pytest.approx(a.width, abs=1e-6)
        for pa, pb in zip(a.points, b.points):
            assert pb.x == pytest.approx(pa.x, abs=2e-6)
            assert pb.y == pytest.approx(pa.y, abs=2e-6)


def make_sequence(strokes, canvas=100):
    entries = tuple(SeqEntry(s.id, 0, i) for i, s in enumerate(strokes))
    return GlobalSequence(
        sketch=StrokeSequence(entries, Stream.SKETCH),
        paint=None,
        strokes=StrokeSet(tuple(strokes), canvas, canvas),
        dist_prox=10.0,
    )


def test_animated_empty():
    seq = make_sequence([])
    svg = emit_animated_svg(seq, seq.strokes, 0.05)
    root = ET.fromstring(svg)
    assert len(root.findall(".//{*}animate")) == 0


def test_animated_timing():
    strokes = [
        Stroke(0, StrokeKind.LINE, (Point(0, 0), Point(1, 0)), BLACK, 1.0),
        Stroke(1, StrokeKind.LINE, (Point(2, 0), Point(3, 0)), BLACK, 1.0),
    ]
    svg = emit_animated_svg(make_sequence(strokes), StrokeSet(tuple(strokes), 100, 100), 0.5)
    root = ET.fromstring(svg)
    anims = root.findall(".//{*}animate")
    assert len(anims) == 2
    assert anims[0].get("begin") == "0s"
    assert anims[1].get("begin") == "0.5s"
    assert anims[1].get("attributeName") == "opacity"


def test_animated_path_count_and_order():
    rng = random.Random(5)
    strokes = []
    while len(strokes) < 12:
        s = rand_stroke(len(strokes), rng)
        if s is not None:
            strokes.append(s)
    # scramble rank order relative to id order
    order = list(range(12))
    rng.shuffle(order)
    entries = tuple(SeqEntry(order[i], 0, i) for i in range(12))
    seq = GlobalSequence(
        sketch=StrokeSequence(entries, Stream.SKETCH),
        paint=None,
        strokes=StrokeSet(tuple(strokes), 100, 100),
        dist_prox=1.0,
    )
    svg = emit_animated_svg(seq, seq.strokes, 0.05)
    root = ET.fromstring(svg)
    paths = root.findall(".//{*}path")
    assert len(paths) == 12
    by_id = {s.id: s for s in strokes}
    from strokeflow.svg_io import stroke_path_data

    for rank, path in enumerate(paths):
        assert path.get("d") == stroke_path_data(by_id[order[rank]])
