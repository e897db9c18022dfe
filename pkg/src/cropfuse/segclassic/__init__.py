"""Classical segmenters: Otsu threshold, Canny contour fill, marker watershed."""

from .edges import (
    EdgeParams,
    canny_edges,
    edge_segment,
    fill_contours,
    gaussian_blur,
    remove_small_objects,
    sobel_gradient,
)
from .otsu import otsu_level, otsu_segment
from .region import RegionParams, markers_from_levels, region_segment, watershed
from .threshold import apply_threshold, to_likelihood

__all__ = [
    "EdgeParams",
    "RegionParams",
    "apply_threshold",
    "canny_edges",
    "edge_segment",
    "fill_contours",
    "gaussian_blur",
    "markers_from_levels",
    "otsu_level",
    "otsu_segment",
    "region_segment",
    "remove_small_objects",
    "sobel_gradient",
    "to_likelihood",
    "watershed",
]
