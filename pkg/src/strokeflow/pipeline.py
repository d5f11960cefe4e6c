"""End-to-end orchestration: input to ordered stroke sequence.

A raster input contributes two stroke streams: a sketch stream traced from
the edge map, and (when painting is on) a paint stream traced from the
posterized colors. Vector input supplies the streams directly as SVG. Each
stream is clustered on anchor points, each cluster's strokes take their
dendrogram leaf order, clusters are visited along a TSP tour of their
centroids, and the sketch stream is drawn before the paint stream.

The manifest writer at the bottom is byte-deterministic: stable key order,
compact separators, and floats via repr.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .clustering import build_dendrogram, cut, intra_order
from .errors import CanvasMismatch, ManifestError, NegativeDistance, NoStrokes
from .model import ArcSpec, Color, Point, Stream, Stroke, StrokeKind, StrokeSet, merge_sets
from .raster import RasterImage
from .sequencing import (
    GlobalSequence,
    SeqEntry,
    StrokeSequence,
    assemble,
    linearize,
    solve_tsp,
)
from .sketch import EdgeParams, extract_sketch
from .svg_io import SvgDocument, document_to_strokes
from .vectorize import FitParams, vectorize_raster

SKETCH_STROKE_WIDTH = 1.0
PAINT_STROKE_WIDTH = 2.0

THREADS_ENV = "STROKEFLOW_THREADS"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the pipeline needs besides the input itself.

    dist_prox None means automatic: an eighth of the longer canvas side.
    """

    dist_prox: float | None = None
    painting: bool = True
    edge: EdgeParams = field(default_factory=EdgeParams)
    fit: FitParams = field(default_factory=FitParams)
    exact_max: int = 15
    seconds_per_stroke: float = 0.05
    frames_every: int = 25

    def __post_init__(self) -> None:
        if self.exact_max < 1:
            raise ValueError("exact_max must be >= 1")
        if not (self.seconds_per_stroke > 0):
            raise ValueError("seconds_per_stroke must be positive")
        if self.frames_every < 1:
            raise ValueError("frames_every must be >= 1")


@dataclass(frozen=True)
class SvgPair:
    """Parsed vector input: a sketch document and an optional paint one."""

    sketch: SvgDocument
    paint: SvgDocument | None = None


def resolve_dist_prox(config: PipelineConfig, canvas: tuple[float, float]) -> float:
    """The clustering radius: explicit value, or max(W, H) / 8 when auto."""
    d = config.dist_prox
    if d is None:
        return max(canvas[0], canvas[1]) / 8.0
    d = float(d)
    if math.isnan(d):
        raise ValueError("dist_prox is NaN")
    if d < 0:
        raise NegativeDistance(f"dist_prox must be >= 0, got {d}")
    return d


def sequence_stream(stroke_set: StrokeSet, stream: Stream, dist_prox: float, exact_max: int) -> StrokeSequence:
    """Cluster, tour and rank one stream's strokes."""
    subset = [s for s in stroke_set if s.stream is stream]
    if not subset:
        return StrokeSequence((), stream)
    view = StrokeSet(tuple(subset), stroke_set.canvas_width, stroke_set.canvas_height)
    dend = build_dendrogram(view)
    part = intra_order(dend, cut(dend, dist_prox))
    tour = solve_tsp(part.centroids, exact_max)
    order = linearize(tour, part.centroids)
    return assemble(order, part, stream)


def _thread_budget() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw) if raw.strip() else 0
    except ValueError:
        n = 0
    if n <= 0:
        n = min(4, os.cpu_count() or 1)
    return n


def sequence_streams(strokes: StrokeSet, config: PipelineConfig, *, painting: bool) -> GlobalSequence:
    """Order a combined stroke set into the global drawing sequence."""
    dist_prox = resolve_dist_prox(config, (strokes.canvas_width, strokes.canvas_height))
    if len(strokes) == 0:
        raise NoStrokes("the input produced no strokes at all")

    if painting and _thread_budget() >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fs = pool.submit(sequence_stream, strokes, Stream.SKETCH, dist_prox, config.exact_max)
            fp = pool.submit(sequence_stream, strokes, Stream.PAINT, dist_prox, config.exact_max)
            sketch_seq, paint_seq = fs.result(), fp.result()
    else:
        sketch_seq = sequence_stream(strokes, Stream.SKETCH, dist_prox, config.exact_max)
        paint_seq = (
            sequence_stream(strokes, Stream.PAINT, dist_prox, config.exact_max) if painting else None
        )
    return GlobalSequence(sketch_seq, paint_seq, strokes, dist_prox)


def _to_grayscale(stroke: Stroke) -> Stroke:
    c = stroke.color
    if c.is_gray:
        return stroke
    v = (299 * c.r + 587 * c.g + 114 * c.b + 500) // 1000
    return replace(stroke, color=Color(v, v, v))


def run(source: RasterImage | SvgPair, config: PipelineConfig = PipelineConfig()) -> GlobalSequence:
    """The whole pipeline: input image or SVG pair to a GlobalSequence."""
    if isinstance(source, RasterImage):
        edge_map = extract_sketch(source, config.edge)
        sketch_set = vectorize_raster(
            edge_map, config.fit, Stream.SKETCH, width=SKETCH_STROKE_WIDTH
        )
        strokes = sketch_set
        if config.painting:
            paint_set = vectorize_raster(
                source,
                config.fit,
                Stream.PAINT,
                width=PAINT_STROKE_WIDTH,
                id_start=len(sketch_set),
            )
            strokes = merge_sets(sketch_set, paint_set)
        painting = config.painting
    else:
        sketch_set = document_to_strokes(source.sketch, stream=Stream.SKETCH)
        # the sketch stream is grayscale by contract
        sketch_set = StrokeSet(
            tuple(_to_grayscale(s) for s in sketch_set),
            sketch_set.canvas_width,
            sketch_set.canvas_height,
        )
        strokes = sketch_set
        painting = config.painting and source.paint is not None
        if source.paint is not None:
            if (source.paint.width, source.paint.height) != (
                source.sketch.width,
                source.sketch.height,
            ):
                raise CanvasMismatch(
                    f"sketch canvas {source.sketch.width}x{source.sketch.height} but paint"
                    f" canvas {source.paint.width}x{source.paint.height}"
                )
            if painting:
                paint_set = document_to_strokes(
                    source.paint, stream=Stream.PAINT, id_start=len(sketch_set)
                )
                strokes = merge_sets(sketch_set, paint_set)

    return sequence_streams(strokes, config, painting=painting)


# ---------------------------------------------------------------------------
# manifest


def _json_dim(v: float) -> int | float:
    return int(v) if float(v).is_integer() else float(v)


def manifest_json(seq: GlobalSequence) -> str:
    """Serialize the sequence. Identical sequences give identical bytes."""
    strokes = seq.strokes.by_id()
    entries = []
    for sid, cluster, rank, stream in seq.combined():
        s = strokes[sid]
        entry: dict = {
            "id": s.id,
            "rank": rank,
            "stream": stream.value,
            "cluster": cluster,
            "kind": s.kind.value,
            "points": [[p.x, p.y] for p in s.points],
            "color": s.color.css(),
            "width": s.width,
            "filled": s.filled,
        }
        if s.kind is StrokeKind.ELLIPTICAL_ARC:
            assert s.arc is not None
            entry["arc"] = {
                "rx": s.arc.rx,
                "ry": s.arc.ry,
                "rotation": s.arc.rotation_deg,
                "large_arc": s.arc.large_arc,
                "sweep": s.arc.sweep,
            }
        entries.append(entry)
    obj = {
        "canvas": {
            "width": _json_dim(seq.strokes.canvas_width),
            "height": _json_dim(seq.strokes.canvas_height),
        },
        "dist_prox": seq.dist_prox,
        "strokes": entries,
    }
    return json.dumps(obj, separators=(",", ":"))


_KIND_BY_NAME = {k.value: k for k in StrokeKind}
_STREAM_BY_NAME = {s.value: s for s in Stream}


def load_manifest(text: str) -> GlobalSequence:
    """Rebuild a GlobalSequence from manifest JSON."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest is not valid JSON: {e}") from None
    try:
        width = float(obj["canvas"]["width"])
        height = float(obj["canvas"]["height"])
        dist_prox = float(obj["dist_prox"])
        raw = obj["strokes"]
        strokes: list[Stroke] = []
        per_stream: dict[Stream, list[tuple[int, int, int]]] = {
            Stream.SKETCH: [],
            Stream.PAINT: [],
        }
        for item in sorted(raw, key=lambda e: e["rank"]):
            kind = _KIND_BY_NAME[item["kind"]]
            stream = _STREAM_BY_NAME[item["stream"]]
            color = item["color"]
            if not (isinstance(color, str) and len(color) == 7 and color[0] == "#"):
                raise ManifestError(f"bad color {color!r}")
            col = Color(int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16))
            arc = None
            if kind is StrokeKind.ELLIPTICAL_ARC:
                a = item["arc"]
                arc = ArcSpec(
                    float(a["rx"]),
                    float(a["ry"]),
                    float(a["rotation"]),
                    bool(a["large_arc"]),
                    bool(a["sweep"]),
                )
            strokes.append(
                Stroke(
                    int(item["id"]),
                    kind,
                    tuple(Point(float(x), float(y)) for x, y in item["points"]),
                    col,
                    float(item["width"]),
                    stream,
                    bool(item["filled"]),
                    arc=arc,
                )
            )
            per_stream[stream].append((int(item["id"]), int(item["cluster"]), int(item["rank"])))
    except ManifestError:
        raise
    except Exception as e:  # missing keys, wrong types, bad values
        raise ManifestError(f"bad manifest structure: {e}") from None

    def to_sequence(rows: list[tuple[int, int, int]], stream: Stream) -> StrokeSequence:
        rows = sorted(rows, key=lambda r: r[2])
        return StrokeSequence(
            tuple(SeqEntry(sid, cluster, i) for i, (sid, cluster, _) in enumerate(rows)),
            stream,
        )

    sketch_seq = to_sequence(per_stream[Stream.SKETCH], Stream.SKETCH)
    paint_rows = per_stream[Stream.PAINT]
    paint_seq = to_sequence(paint_rows, Stream.PAINT) if paint_rows else None
    try:
        stroke_set = StrokeSet(tuple(strokes), width, height)
        return GlobalSequence(sketch_seq, paint_seq, stroke_set, dist_prox)
    except Exception as e:
        raise ManifestError(f"inconsistent manifest: {e}") from None
