"""strokeflow: turn artwork into an ordered, animated drawing sequence.

The library converts an input image (raster PNG or vector SVG) into
strokes, groups nearby strokes, orders the groups along a short tour, and
replays the result stroke by stroke as an animation, a frame sequence and
a JSON manifest.
"""
from .clustering import (
    ClusterPartition,
    Dendrogram,
    Merge,
    build_dendrogram,
    cut,
    intra_order,
    linkage_csv,
)
from .errors import (
    BadPathData,
    CanvasMismatch,
    DegenerateContour,
    EmptyImage,
    EmptySet,
    InvalidStroke,
    MalformedXml,
    ManifestError,
    NegativeDistance,
    NoStrokes,
    StrokeFlowError,
    TooManyColors,
    UnsupportedFeature,
)
from .model import (
    ARITY,
    ArcSpec,
    Color,
    Point,
    Stream,
    Stroke,
    StrokeKind,
    StrokeSet,
    anchor,
    flatten,
    merge_sets,
)
from .pipeline import (
    PipelineConfig,
    SvgPair,
    load_manifest,
    manifest_json,
    resolve_dist_prox,
    run,
    sequence_stream,
    sequence_streams,
)
from .raster import RasterImage, gray_image, load_png, save_png, solid_image
from .render import Canvas, draw_stroke, iter_frames, render_all, render_frames
from .sequencing import (
    GlobalSequence,
    SeqEntry,
    StrokeSequence,
    Tour,
    assemble,
    linearize,
    solve_tsp,
    tour_csv,
    two_opt_seed_and_tour,
)
from .sketch import EdgeParams, extract_sketch
from .svg_io import (
    SvgDocument,
    document_to_strokes,
    emit_animated_svg,
    emit_static_svg,
    parse_svg,
    read_document,
)
from .vectorize import (
    Contour,
    FitParams,
    fit_curves,
    posterize,
    simplify,
    trace_contours,
    vectorize_raster,
)

__version__ = "0.1.0"

__all__ = [
    "ARITY",
    "ArcSpec", "BadPathData", "Canvas", "CanvasMismatch", "ClusterPartition", "Color",
    "Contour", "DegenerateContour", "Dendrogram", "EdgeParams", "EmptyImage", "EmptySet",
    "FitParams", "GlobalSequence", "InvalidStroke", "MalformedXml", "ManifestError",
    "Merge", "NegativeDistance", "NoStrokes", "PipelineConfig", "Point", "RasterImage",
    "SeqEntry", "Stream", "Stroke", "StrokeFlowError", "StrokeKind", "StrokeSequence",
    "StrokeSet", "SvgDocument", "SvgPair", "TooManyColors", "Tour", "UnsupportedFeature",
    "anchor", "assemble", "build_dendrogram", "cut", "document_to_strokes", "draw_stroke",
    "emit_animated_svg", "emit_static_svg", "extract_sketch", "fit_curves", "flatten",
    "gray_image", "intra_order", "iter_frames", "linearize", "linkage_csv", "load_manifest",
    "load_png", "manifest_json", "merge_sets", "parse_svg", "posterize", "read_document",
    "render_all", "render_frames", "resolve_dist_prox", "run", "save_png", "sequence_stream",
    "sequence_streams", "simplify", "solid_image", "solve_tsp", "trace_contours", "tour_csv", "two_opt_seed_and_tour",
    "vectorize_raster",
]
