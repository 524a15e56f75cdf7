"""Retinal vessel segmentation by three-segment logarithmic probing."""

from ._core import (
    M,
    ConfusionCounts,
    EvalSummary,
    MetricsRecord,
    Offset,
    ProbeFamily,
    ProbeSpec,
    RasterProbe,
    SegmentationResult,
    adapt_intensities,
    aggregate,
    complement,
    confusion,
    detector_map_orientation,
    detector_map_probe,
    digital_line,
    fill_small_holes,
    fov_diameter,
    fov_from_image,
    image_mean,
    kth_min,
    lip_add,
    lip_sub,
    luminance,
    make_probe_family,
    metrics,
    normalize_map,
    orientations,
    probe_lengths,
    probe_widths,
    profile_detector_1d,
    rasterize,
    remove_small_components,
    render_overlay,
    segment_vessels,
    threshold_by_area,
    vesselness,
)

__all__ = [
    "M",
    "ConfusionCounts",
    "EvalSummary",
    "MetricsRecord",
    "Offset",
    "ProbeFamily",
    "ProbeSpec",
    "RasterProbe",
    "SegmentationResult",
    "adapt_intensities",
    "aggregate",
    "complement",
    "confusion",
    "detector_map_orientation",
    "detector_map_probe",
    "digital_line",
    "fill_small_holes",
    "fov_diameter",
    "fov_from_image",
    "image_mean",
    "kth_min",
    "lip_add",
    "lip_sub",
    "luminance",
    "make_probe_family",
    "metrics",
    "normalize_map",
    "orientations",
    "probe_lengths",
    "probe_widths",
    "profile_detector_1d",
    "rasterize",
    "remove_small_components",
    "render_overlay",
    "segment_vessels",
    "threshold_by_area",
    "vesselness",
]
