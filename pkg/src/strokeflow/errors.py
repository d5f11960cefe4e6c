"""Exception types raised across the package.

Everything user-facing derives from StrokeFlowError so callers (and the CLI)
can distinguish bad input from an internal bug: StrokeFlowError means the
input or configuration was unusable, anything else is our fault.
"""
from __future__ import annotations


class StrokeFlowError(Exception):
    """Base class for all errors caused by input data or configuration."""


class MalformedXml(StrokeFlowError):
    """The SVG document is not well-formed XML or lacks an svg root."""


class UnsupportedFeature(StrokeFlowError):
    """The SVG uses a feature outside the supported subset.

    The offending feature name is kept in ``feature``; the fix is usually to
    flatten the file (expand text to paths, bake transforms, remove CSS)
    before feeding it in.
    """

    def __init__(self, feature: str, detail: str = ""):
        self.feature = feature
        msg = f"unsupported SVG feature: {feature}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class BadPathData(StrokeFlowError):
    """A path d-string failed to parse. ``position`` is the character offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at offset {position}")


class EmptyImage(StrokeFlowError):
    """A raster operation received an image with zero pixels."""


class TooManyColors(StrokeFlowError):
    """Contour tracing refuses images with more than 64 distinct colors."""


class DegenerateContour(StrokeFlowError):
    """A contour had too few usable points to fit anything."""


class EmptySet(StrokeFlowError):
    """Clustering needs at least one stroke."""


class NoStrokes(StrokeFlowError):
    """The pipeline produced zero strokes (e.g. a blank input image)."""


class NegativeDistance(StrokeFlowError):
    """dist_prox must be >= 0."""


class InvalidStroke(StrokeFlowError):
    """A stroke or stroke set violated a structural invariant."""


class CanvasMismatch(StrokeFlowError):
    """Sketch and paint inputs disagree about the canvas size."""


class ManifestError(StrokeFlowError):
    """A sequence manifest failed to parse or is structurally wrong."""
