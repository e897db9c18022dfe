"""Per-pixel spectral arithmetic."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, DomainError
from .imagecore import RGB_BANDS, BandImage, BandName, Domain, MultispectralFrame

# ITU-R BT.601 luma weights
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def _check_same_shape(a: BandImage, b: BandImage) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"band shapes differ: {a.shape} vs {b.shape}")


def ndvi(nir: BandImage, red: BandImage) -> BandImage:
    """Normalized difference vegetation index, (NIR - Red) / (NIR + Red).

    Pixels where both bands are zero get 0. The result is in the signed
    domain.
    """
    _check_same_shape(nir, red)
    if nir.domain is not Domain.UNIT or red.domain is not Domain.UNIT:
        raise DomainError("ndvi expects unit-domain NIR and Red bands")
    num = nir.values - red.values
    den = nir.values + red.values
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return BandImage(np.clip(out, -1.0, 1.0), Domain.SIGNED)


def grayscale(frame: MultispectralFrame) -> BandImage:
    frame.require(RGB_BANDS)
    wr, wg, wb = GRAY_WEIGHTS
    r, g, b = (frame[n].values for n in RGB_BANDS)
    out = wr * r + wg * g + wb * b
    return BandImage(np.clip(out, 0.0, 1.0), Domain.UNIT)


def rescale_to_unit(img: BandImage) -> BandImage:
    """Map a signed-domain band onto [0, 1] via (v + 1) / 2."""
    if img.domain is not Domain.SIGNED:
        raise DomainError("rescale_to_unit expects a signed-domain band")
    return BandImage((img.values + 1.0) / 2.0, Domain.UNIT)


def rescale_to_signed(img: BandImage) -> BandImage:
    """Inverse of :func:`rescale_to_unit`."""
    if img.domain is not Domain.UNIT:
        raise DomainError("rescale_to_signed expects a unit-domain band")
    return BandImage(img.values * 2.0 - 1.0, Domain.SIGNED)


def ndvi_unit(frame: MultispectralFrame) -> BandImage:
    """NDVI of a frame, already rescaled to the unit domain."""
    frame.require((BandName.NIR, BandName.RED))
    return rescale_to_unit(ndvi(frame[BandName.NIR], frame[BandName.RED]))
