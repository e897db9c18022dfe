"""Early (input-space) and late (likelihood-space) fusion of NDVI and RGB."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionMismatch, DomainError
from .imagecore import (
    RGB_BANDS,
    BandImage,
    BandName,
    Domain,
    LikelihoodMask,
    MultispectralFrame,
    save_band,
)

STACK_ORDER = (BandName.RED, BandName.GREEN, BandName.BLUE, BandName.NDVI)


@dataclass(frozen=True)
class FusionWeights:
    """Weights of the NDVI branch (alpha) and the RGB branch (beta)."""

    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and math.isfinite(b)) or a < 0 or b < 0:
            raise ConfigError(f"fusion weights must be non-negative, got alpha={a}, beta={b}")
        if abs(a + b - 1.0) > 1e-9:
            raise ConfigError(f"fusion weights must sum to 1, got alpha+beta={a + b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def swapped(self) -> "FusionWeights":
        return FusionWeights(self.beta, self.alpha)


def early_fuse_mean(ndvi_unit: BandImage, gray: BandImage) -> BandImage:
    if ndvi_unit.shape != gray.shape:
        raise DimensionMismatch(f"cannot fuse {ndvi_unit.shape} with {gray.shape}")
    if ndvi_unit.domain is not Domain.UNIT or gray.domain is not Domain.UNIT:
        raise DomainError("early fusion expects both operands in the unit domain")
    return BandImage((ndvi_unit.values + gray.values) / 2.0, Domain.UNIT)


def early_fuse_stack(frame: MultispectralFrame, ndvi: BandImage) -> MultispectralFrame:
    """Four-band [R, G, B, NDVI] frame for consumption by external learners."""
    frame.require(RGB_BANDS)
    if ndvi.shape != frame.shape:
        raise DimensionMismatch(f"NDVI {ndvi.shape} does not match frame {frame.shape}")
    bands = {n: frame[n] for n in RGB_BANDS}
    bands[BandName.NDVI] = ndvi
    return MultispectralFrame(frame.frame_id, bands)


def export_stack(stacked: MultispectralFrame, root) -> Path:
    """Write a stacked frame as ``<root>/<frame_id>/{r,g,b,ndvi}.png`` plus a manifest.

    NDVI is written as 16-bit PNG over its own domain (signed NDVI maps -1..1
    onto 0..65535) and the manifest line records band order and domains.
    """
    if stacked.band_order != list(STACK_ORDER):
        raise DimensionMismatch(f"expected band order {STACK_ORDER}, got {stacked.band_order}")
    out = Path(root) / stacked.frame_id
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for name in STACK_ORDER:
        img = stacked[name]
        bits = 8 if name in RGB_BANDS else 16
        save_band(img, out / f"{name.value}.png", bits=bits)
        entries.append(f"{name.value}:{img.domain.value}:{bits}")
    manifest = out / "stack.txt"
    manifest.write_text("STACK " + " ".join(entries) + "\n")
    return manifest


def late_fuse(q_n: LikelihoodMask, q_rgb: LikelihoodMask, w: FusionWeights) -> LikelihoodMask:
    """Pixel-wise weighted sum alpha * q_n + beta * q_rgb."""
    if q_n.shape != q_rgb.shape:
        raise DimensionMismatch(f"cannot fuse likelihoods {q_n.shape} and {q_rgb.shape}")
    fused = w.alpha * q_n.values.astype(np.float64) + w.beta * q_rgb.values.astype(np.float64)
    # alpha + beta may exceed 1 by up to 1e-9
    return LikelihoodMask(np.clip(fused, 0.0, 1.0).astype(np.float32))
