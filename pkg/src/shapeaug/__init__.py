"""Occlusion augmentation for event-camera data.

Random convex polygons (or legacy squares/circles) travel across the
frame on quadratic Bezier paths; their synthetic events are merged into
a real event histogram while real events hidden behind them are masked
out.  Everything is deterministic given (seed, sample_index).
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DataError, DegenerateGeometryError,
                     FormatError, ShapeAugError)
from .events import (EVENT_DTYPE, Event, EventHistogram, EventStream,
                     NEGATIVE, POSITIVE, build_histogram, merge_histograms,
                     resize_bilinear)
from .io_formats import (EVENTS_FORMAT_VERSION, HISTOGRAM_FORMAT_VERSION,
                         export_frames_png, read_config, read_events,
                         read_histogram, write_config, write_events,
                         write_histogram)
from .motion import (PathSpec, bezier_points, place_shape_at_step,
                     rotate_shape, sample_path)
from .pipeline import (AugConfig, AugResult, GeoParams, MODE_LEGACY,
                       MODE_NONE, MODE_SHAPEAUGPP, augment, augment_batch,
                       augment_detail, augment_geometric, derive_rng,
                       sample_shape_motion)
from .render import (Frame, FrameSequence, circle_coverage, polygon_coverage,
                     rasterize_scene, render_sequence)
from .shapes import (SceneSpec, ShapeSpec, convex_hull, sample_legacy_shape,
                     sample_polygon, sample_scene)
from .simulate import (NoiseParams, apply_noise, diff_to_events,
                       occlusion_mask, simulate_shape_events)

__all__ = [
    "__version__",
    # errors
    "ShapeAugError", "ConfigError", "DataError", "DegenerateGeometryError",
    "FormatError",
    # events
    "Event", "EventStream", "EventHistogram", "EVENT_DTYPE", "NEGATIVE",
    "POSITIVE", "build_histogram", "resize_bilinear", "merge_histograms",
    # shapes
    "ShapeSpec", "SceneSpec", "convex_hull", "sample_polygon",
    "sample_scene", "sample_legacy_shape",
    # motion
    "PathSpec", "bezier_points", "sample_path", "rotate_shape",
    "place_shape_at_step",
    # render
    "Frame", "FrameSequence", "polygon_coverage", "circle_coverage",
    "rasterize_scene", "render_sequence",
    # simulate
    "NoiseParams", "diff_to_events", "apply_noise", "occlusion_mask",
    "simulate_shape_events",
    # pipeline
    "AugConfig", "AugResult", "GeoParams", "MODE_SHAPEAUGPP", "MODE_LEGACY",
    "MODE_NONE", "augment", "augment_detail", "augment_batch",
    "augment_geometric", "derive_rng", "sample_shape_motion",
    # io
    "EVENTS_FORMAT_VERSION", "HISTOGRAM_FORMAT_VERSION", "read_events",
    "write_events", "read_histogram", "write_histogram", "read_config",
    "write_config", "export_frames_png",
]
