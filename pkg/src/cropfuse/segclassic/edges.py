"""Sobel gradients, Canny edges and contour-filling segmentation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DomainError, ImageTooSmall
from ..imagecore import BandImage, BinaryMask, Domain
from . import _kernels

# Largest Sobel magnitude reachable on a [0, 1] image: gx = 4, gy = 2.
SOBEL_MAX = math.sqrt(20.0)


@dataclass(frozen=True)
class EdgeParams:
    gaussian_sigma: float = 1.4
    low_ratio: float = 0.5
    high_quantile: float = 0.9
    min_object_px: int = 64

    def __post_init__(self):
        if not self.gaussian_sigma > 0:
            raise ConfigError("gaussian_sigma must be positive")
        if not 0 < self.low_ratio < 1:
            raise ConfigError("low_ratio must lie in (0, 1)")
        if not 0 < self.high_quantile < 1:
            raise ConfigError("high_quantile must lie in (0, 1)")
        if self.min_object_px < 0:
            raise ConfigError("min_object_px must be >= 0")

    @property
    def kernel_radius(self) -> int:
        return int(math.ceil(3.0 * self.gaussian_sigma))


def _sobel_xy(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw Sobel responses with edge replication; gx along columns, gy along rows."""
    p = np.pad(values, 1, mode="edge")
    left = p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    right = p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]
    top = p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    bottom = p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]
    return right - left, bottom - top


def sobel_gradient(img: BandImage) -> BandImage:
    """Sobel magnitude scaled to [0, 1] by the largest attainable response."""
    if img.height < 3 or img.width < 3:
        raise ImageTooSmall(f"sobel needs at least 3x3, got {img.width}x{img.height}")
    if img.domain is not Domain.UNIT:
        raise DomainError("sobel_gradient expects a unit-domain band")
    gx, gy = _sobel_xy(img.values)
    mag = np.hypot(gx, gy) / SOBEL_MAX
    return BandImage(np.clip(mag, 0.0, 1.0), Domain.UNIT)


def gaussian_blur(values: np.ndarray, sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    kernel /= kernel.sum()
    h, w = values.shape
    p = np.pad(values, radius, mode="edge")
    rows = np.zeros((h + 2 * radius, w))
    for i, k in enumerate(kernel):
        rows += k * p[:, i : i + w]
    out = np.zeros((h, w))
    for i, k in enumerate(kernel):
        out += k * rows[i : i + h, :]
    return out


def non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Keep pixels that are ridge maxima across their quantized gradient direction.

    A pixel survives when it is strictly greater than its neighbor behind and
    at least its neighbor ahead, so two-pixel plateaus thin to one pixel.
    """
    h, w = mag.shape
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(np.int64)) % 4
    # (d_row, d_col) of the neighbor "ahead" along the gradient, per sector
    steps = ((0, 1), (1, 1), (1, 0), (1, -1))
    p = np.pad(mag, 1, mode="edge")
    keep = np.zeros((h, w), dtype=bool)
    for s, (dr, dc) in enumerate(steps):
        ahead = p[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        behind = p[1 - dr : 1 - dr + h, 1 - dc : 1 - dc + w]
        keep |= (sector == s) & (mag > behind) & (mag >= ahead)
    return keep & (mag > 0)


def canny_edges(img: BandImage, p: EdgeParams = EdgeParams()) -> BinaryMask:
    side = 2 * p.kernel_radius + 1
    if min(img.shape) < 5 or img.height < side or img.width < side:
        raise ImageTooSmall(
            f"canny with sigma={p.gaussian_sigma} needs at least {max(5, side)}px per side, "
            f"got {img.width}x{img.height}"
        )
    smooth = gaussian_blur(img.values, p.gaussian_sigma)
    gx, gy = _sobel_xy(smooth)
    mag = np.hypot(gx, gy)
    thin = non_max_suppression(mag, gx, gy)
    high = float(np.quantile(mag, p.high_quantile))
    low = p.low_ratio * high
    strong = thin & (mag >= high)
    weak = thin & (mag >= low)
    edges = _kernels.grow_from_seeds(strong, weak, _kernels.offsets(8))
    return BinaryMask(edges)


def fill_contours(edges: BinaryMask) -> BinaryMask:
    """Everything not 4-connected to the image border through non-edge pixels."""
    free = ~edges.values
    border = np.zeros_like(free)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    outside = _kernels.grow_from_seeds(border & free, free, _kernels.offsets(4))
    return BinaryMask(~outside)


def remove_small_objects(mask: BinaryMask, min_px: int) -> BinaryMask:
    """Drop 8-connected components with fewer than ``min_px`` pixels."""
    if min_px <= 1:
        return mask
    labels, sizes = _kernels.label_components(np.ascontiguousarray(mask.values), _kernels.offsets(8))
    keep = sizes >= min_px
    keep[0] = False
    return BinaryMask(keep[labels])


def edge_segment(img: BandImage, p: EdgeParams = EdgeParams()) -> BinaryMask:
    edges = canny_edges(img, p)
    return remove_small_objects(fill_contours(edges), p.min_object_px)
