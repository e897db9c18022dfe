"""Marker-controlled watershed on the Sobel elevation map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionMismatch, ImageTooSmall, NoMarkers
from ..imagecore import BandImage, BinaryMask
from . import _kernels
from .edges import sobel_gradient

BACKGROUND = 1
FOREGROUND = 2


@dataclass(frozen=True)
class RegionParams:
    """Marker levels for the region segmenter.

    With ``relative=True`` (default) the levels are positions within the
    image's own intensity range ``[min, max]``; with ``relative=False`` they
    are compared with the raw unit intensities.
    """

    bg_marker_level: float = 0.3
    fg_marker_level: float = 0.7
    relative: bool = True

    def __post_init__(self):
        if not 0.0 <= self.bg_marker_level < self.fg_marker_level <= 1.0:
            raise ConfigError("need 0 <= bg_marker_level < fg_marker_level <= 1")


def markers_from_levels(img: BandImage, p: RegionParams) -> np.ndarray:
    v = img.values
    if p.relative:
        lo, hi = float(v.min()), float(v.max())
        bg_cut = lo + p.bg_marker_level * (hi - lo)
        fg_cut = lo + p.fg_marker_level * (hi - lo)
    else:
        bg_cut, fg_cut = p.bg_marker_level, p.fg_marker_level
    markers = np.zeros(v.shape, dtype=np.int32)
    markers[v < bg_cut] = BACKGROUND
    markers[v > fg_cut] = FOREGROUND
    return markers


def watershed(elevation: np.ndarray, markers: np.ndarray) -> np.ndarray:
    """Flood ``elevation`` from labeled ``markers`` (0 = unlabeled), 4-connected."""
    elevation = np.ascontiguousarray(elevation, dtype=np.float64)
    markers = np.ascontiguousarray(markers, dtype=np.int32)
    if elevation.shape != markers.shape:
        raise DimensionMismatch(f"elevation {elevation.shape} vs markers {markers.shape}")
    if not (markers > 0).any():
        raise NoMarkers("watershed needs at least one marker")
    return _kernels.priority_flood(elevation, markers, _kernels.offsets(4))


def region_segment(img: BandImage, p: RegionParams = RegionParams()) -> BinaryMask:
    if img.height < 3 or img.width < 3:
        raise ImageTooSmall(f"region segmentation needs at least 3x3, got {img.width}x{img.height}")
    markers = markers_from_levels(img, p)
    if not (markers == BACKGROUND).any():
        raise NoMarkers("no background markers below the background level")
    if not (markers == FOREGROUND).any():
        raise NoMarkers("no foreground markers above the foreground level")
    elevation = sobel_gradient(img).values
    return BinaryMask(watershed(elevation, markers) == FOREGROUND)
