"""Command line interface.

Subcommands mirror the pipeline stages: sketch (edge map), vectorize
(raster to strokes), sequence (SVG input to manifest), render (manifest to
frames), and run (everything). Exit status is 0 on success, 1 for any
problem with the input or flags, and 2 for an internal failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import pipeline, render, svg_io
from .errors import StrokeFlowError, UnsupportedFeature
from .model import Stream
from .raster import load_png, save_png
from .sketch import EdgeParams, extract_sketch
from .vectorize import FitParams, vectorize_raster


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2; we use 1
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _dist_prox(value: str) -> float | None:
    if value.strip().lower() == "auto":
        return None
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {value!r}") from None


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {value!r}")


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-fit-error", type=float, default=1.0, metavar="PX",
                   help="curve fitting error budget in pixels (default 1.0)")
    p.add_argument("--corner-angle", type=float, default=60.0, metavar="DEG",
                   help="turning angle treated as a corner (default 60)")
    p.add_argument("--simplify-epsilon", type=float, default=0.5, metavar="PX",
                   help="polyline simplification tolerance (default 0.5)")
    p.add_argument("--posterize-levels", type=int, default=8, metavar="N",
                   help="color levels per channel for the paint stream (default 8)")


def _add_sequence_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist-prox", type=_dist_prox, default=None, metavar="D",
                   help="clustering radius in canvas units, or 'auto' for max(W,H)/8")
    p.add_argument("--exact-max", type=int, default=15, metavar="M",
                   help="largest cluster count solved with exact TSP (default 15)")


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frames-every", type=int, default=25, metavar="K",
                   help="write a frame after every K strokes (default 25)")
    p.add_argument("--seconds-per-stroke", type=float, default=0.05, metavar="S",
                   help="per-stroke delay in the animated SVG (default 0.05)")
    p.add_argument("--aa", action=argparse.BooleanOptionalAction, default=False,
                   help="antialias rendered frames (default: --no-aa)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strokeflow",
                     description="Turn artwork into an ordered, animated drawing sequence.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sketch", help="extract a binary edge map from a raster image")
    p.add_argument("input", help="input PNG")
    p.add_argument("-o", "--out", default="out", help="output directory (default ./out)")
    p.add_argument("--sigma", type=float, default=1.0, help="base blur sigma (default 1.0)")
    p.add_argument("--dog-k", type=float, default=1.6, help="second blur scale factor (default 1.6)")
    p.add_argument("--edge-threshold", type=float, default=0.1,
                   help="normalized response threshold (default 0.1)")

    p = sub.add_parser("vectorize", help="convert a raster image to strokes (static SVG)")
    p.add_argument("input", help="input PNG")
    p.add_argument("-o", "--out", default="out", help="output directory (default ./out)")
    p.add_argument("--stream", choices=["sketch", "paint"], default="sketch",
                   help="treat the image as a sketch (binarized) or paint (posterized) source")
    _add_fit_flags(p)

    p = sub.add_parser("sequence", help="order SVG strokes into a drawing manifest")
    p.add_argument("input", help="sketch SVG")
    p.add_argument("-o", "--out", default="out", help="output directory (default ./out)")
    p.add_argument("--paint-svg", metavar="FILE", default=None,
                   help="optional second SVG drawn after the sketch")
    p.add_argument("--painting", type=_bool, default=None, metavar="BOOL",
                   help="include a paint stream (default: true when paint input exists)")
    _add_sequence_flags(p)

    p = sub.add_parser("render", help="rasterize a manifest into PNG frames")
    p.add_argument("input", help="manifest.json from sequence or run")
    p.add_argument("-o", "--out", default="out", help="output directory (default ./out)")
    _add_render_flags(p)

    p = sub.add_parser("run", help="full pipeline: image or SVG to manifest, animation and frames")
    p.add_argument("input", help="input PNG or SVG")
    p.add_argument("-o", "--out", default="out", help="output directory (default ./out)")
    p.add_argument("--paint-svg", metavar="FILE", default=None,
                   help="paint SVG to accompany a sketch SVG input")
    p.add_argument("--painting", type=_bool, default=None, metavar="BOOL",
                   help="include the paint stream (default: true for PNG, false for bare SVG)")
    p.add_argument("--sigma", type=float, default=1.0, help="base blur sigma (default 1.0)")
    p.add_argument("--dog-k", type=float, default=1.6, help="second blur scale factor (default 1.6)")
    p.add_argument("--edge-threshold", type=float, default=0.1,
                   help="normalized response threshold (default 0.1)")
    _add_fit_flags(p)
    _add_sequence_flags(p)
    _add_render_flags(p)

    return parser


def _is_svg_input(path: str) -> bool:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".svg":
        return True
    if ext == ".png":
        return False
    with open(path, "rb") as f:
        head = f.read(4096)
    if head.startswith(b"\x89PNG"):
        return False
    if b"<svg" in head:
        return True
    raise UnsupportedFeature(f"cannot tell what kind of input {path!r} is")


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _write_frames(out_dir: str, seq, stroke_set, every: int, antialias: bool) -> int:
    frames_dir = os.path.join(out_dir, "frames")
    os.makedirs(frames_dir, exist_ok=True)
    count = 0
    for _, canvas in render.iter_frames(seq, stroke_set, every, antialias=antialias):
        count += 1
        save_png(canvas.pixels, os.path.join(frames_dir, f"frame_{count:06d}.png"), fast=True)
    return count


def _edge_params(args: argparse.Namespace) -> EdgeParams:
    return EdgeParams(sigma=args.sigma, k=args.dog_k, threshold=args.edge_threshold)


def _fit_params(args: argparse.Namespace) -> FitParams:
    return FitParams(
        max_error=args.max_fit_error,
        corner_angle_deg=args.corner_angle,
        simplify_epsilon=args.simplify_epsilon,
        posterize_levels=args.posterize_levels,
    )


def _cmd_sketch(args: argparse.Namespace) -> int:
    image = load_png(args.input)
    edges = extract_sketch(image, _edge_params(args))
    os.makedirs(args.out, exist_ok=True)
    save_png(edges, os.path.join(args.out, "sketch.png"))
    print(os.path.join(args.out, "sketch.png"))
    return 0


def _cmd_vectorize(args: argparse.Namespace) -> int:
    image = load_png(args.input)
    stream = Stream.SKETCH if args.stream == "sketch" else Stream.PAINT
    width = pipeline.SKETCH_STROKE_WIDTH if stream is Stream.SKETCH else pipeline.PAINT_STROKE_WIDTH
    strokes = vectorize_raster(image, _fit_params(args), stream, width=width)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "strokes.svg")
    _write_text(path, svg_io.emit_static_svg(strokes))
    print(f"{path} ({len(strokes)} strokes)")
    return 0


def _announce_dist_prox(args: argparse.Namespace, seq) -> None:
    if args.dist_prox is None:
        print(f"dist_prox: auto -> {seq.dist_prox}", file=sys.stderr)


def _svg_source(args: argparse.Namespace) -> pipeline.SvgPair:
    sketch_doc = svg_io.read_document(_read_text(args.input))
    paint_doc = None
    if args.paint_svg is not None:
        paint_doc = svg_io.read_document(_read_text(args.paint_svg))
    return pipeline.SvgPair(sketch_doc, paint_doc)


def _cmd_sequence(args: argparse.Namespace) -> int:
    if not _is_svg_input(args.input):
        raise UnsupportedFeature("sequence takes an svg file; use run for raster input")
    source = _svg_source(args)
    painting = args.painting if args.painting is not None else source.paint is not None
    config = pipeline.PipelineConfig(
        dist_prox=args.dist_prox,
        painting=painting,
        exact_max=args.exact_max,
    )
    seq = pipeline.run(source, config)
    _announce_dist_prox(args, seq)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "manifest.json")
    _write_text(path, pipeline.manifest_json(seq))
    print(f"{path} ({len(seq)} strokes)")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    seq = pipeline.load_manifest(_read_text(args.input))
    os.makedirs(args.out, exist_ok=True)
    n = _write_frames(args.out, seq, seq.strokes, args.frames_every, args.aa)
    final = render.render_all(seq, seq.strokes, antialias=args.aa)
    save_png(final.pixels, os.path.join(args.out, "final.png"))
    print(f"{n} frames + final.png in {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    if _is_svg_input(args.input):
        source = _svg_source(args)
        painting = args.painting if args.painting is not None else source.paint is not None
    else:
        source = load_png(args.input)
        painting = args.painting if args.painting is not None else True
        if args.paint_svg is not None:
            raise UnsupportedFeature("--paint-svg only applies to SVG input")
    config = pipeline.PipelineConfig(
        dist_prox=args.dist_prox,
        painting=painting,
        edge=_edge_params(args),
        fit=_fit_params(args),
        exact_max=args.exact_max,
        seconds_per_stroke=args.seconds_per_stroke,
        frames_every=args.frames_every,
    )
    seq = pipeline.run(source, config)
    _announce_dist_prox(args, seq)
    os.makedirs(args.out, exist_ok=True)
    _write_text(os.path.join(args.out, "manifest.json"), pipeline.manifest_json(seq))
    _write_text(
        os.path.join(args.out, "animated.svg"),
        svg_io.emit_animated_svg(seq, seq.strokes, args.seconds_per_stroke),
    )
    n = _write_frames(args.out, seq, seq.strokes, args.frames_every, args.aa)
    print(f"{len(seq)} strokes, {n} frames -> {args.out}")
    return 0


_COMMANDS = {
    "sketch": _cmd_sketch,
    "vectorize": _cmd_vectorize,
    "sequence": _cmd_sequence,
    "render": _cmd_render,
    "run": _cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except StrokeFlowError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - anything else is a bug in here
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
