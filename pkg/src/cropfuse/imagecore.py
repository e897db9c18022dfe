"""Raster types and their on-disk formats.

Every in-memory raster is a 2D numpy array indexed ``[row, col]`` (row-major,
``height x width``).  Intensities are real valued: 8/16-bit samples are
normalized when a file is read, so all band arithmetic works on one scale.
"""

from __future__ import annotations

import enum
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from PIL import Image

from .errors import DimensionMismatch, DomainError, FormatError, MissingBand, OutOfRange

__all__ = [
    "Domain",
    "BandName",
    "BandImage",
    "MultispectralFrame",
    "LikelihoodMask",
    "BinaryMask",
    "load_band",
    "save_band",
    "load_mask",
    "save_mask",
    "load_frame",
    "save_likelihood",
    "load_likelihood",
    "resize_bilinear",
    "resize_mask",
]


class Domain(enum.Enum):
    UNIT = "unit"
    SIGNED = "signed"

    @property
    def bounds(self) -> tuple[float, float]:
        return (0.0, 1.0) if self is Domain.UNIT else (-1.0, 1.0)


class BandName(enum.Enum):
    """Closed set of band names; the value doubles as the file stem."""

    RED = "r"
    GREEN = "g"
    BLUE = "b"
    RED_EDGE = "re"
    NIR = "nir"
    NDVI = "ndvi"
    GRAY = "gray"
    FUSED = "fused"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "BandName":
        key = text.strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower(), member.name.lower().replace("_", "")):
                return member
        raise ValueError(f"unknown band name {text!r}")


RGB_BANDS = (BandName.RED, BandName.GREEN, BandName.BLUE)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 2:
        raise FormatError(f"expected a 2D grid, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise FormatError(f"zero-sized image {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BandImage:
    values: np.ndarray
    domain: Domain = Domain.UNIT

    def __post_init__(self):
        arr = _frozen(self.values, np.float64)
        lo, hi = self.domain.bounds
        if not np.all(np.isfinite(arr)):
            raise DomainError("band contains non-finite values")
        if arr.min() < lo or arr.max() > hi:
            raise DomainError(
                f"values [{arr.min():.6g}, {arr.max():.6g}] outside {self.domain.value} domain"
            )
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class LikelihoodMask:
    """Per-pixel positive-class likelihood, stored as float32 in [0, 1].

    float32 is the canonical precision so that the LMSK file format
    round-trips bit-exactly.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values, np.float32)
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise OutOfRange("likelihood values must lie in [0, 1]")
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, LikelihoodMask):
            return NotImplemented
        a, b = self.values, other.values
        return a.shape == b.shape and a.tobytes() == b.tobytes()


@dataclass(frozen=True, eq=False)
class BinaryMask:
    values: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.values)
        if raw.dtype != np.bool_ and not np.isin(raw, (0, 1)).all():
            raise DomainError("binary mask values must be 0 or 1")
        object.__setattr__(self, "values", _frozen(raw, np.bool_))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class MultispectralFrame:
    frame_id: str
    bands: Mapping[BandName, BandImage] = field(default_factory=dict)

    def __post_init__(self):
        bands = dict(self.bands)
        if not bands:
            raise FormatError(f"frame {self.frame_id!r} has no bands")
        shapes = {img.shape for img in bands.values()}
        if len(shapes) != 1:
            raise DimensionMismatch(f"frame {self.frame_id!r} mixes band sizes {sorted(shapes)}")
        object.__setattr__(self, "bands", bands)

    @property
    def band_count(self) -> int:
        return len(self.bands)

    @property
    def band_order(self) -> list[BandName]:
        return list(self.bands)

    @property
    def shape(self) -> tuple[int, int]:
        return next(iter(self.bands.values())).shape

    def __getitem__(self, name: BandName) -> BandImage:
        try:
            return self.bands[name]
        except KeyError:
            raise MissingBand(f"frame {self.frame_id!r} has no {name.name} band") from None

    def __contains__(self, name) -> bool:
        return name in self.bands

    def require(self, names: Iterable[BandName]) -> None:
        missing = [n for n in names if n not in self.bands]
        if missing:
            raise MissingBand(
                f"frame {self.frame_id!r} lacks band(s) {', '.join(n.name for n in missing)}"
            )


# -- PNG / PGM ---------------------------------------------------------------

_MODE_MAX = {"L": 255, "I;16": 65535, "I;16B": 65535, "I;16L": 65535, "I": 65535}


def _read_samples(path) -> tuple[np.ndarray, int]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in _MODE_MAX:
                raise FormatError(f"{path}: unsupported image mode {mode!r} (need 8/16-bit gray)")
            samples = np.array(im, dtype=np.int64)
    except FormatError:
        raise
    except (OSError, SyntaxError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if samples.size == 0:
        raise FormatError(f"{path}: zero-sized image")
    full = _MODE_MAX[mode]
    if samples.min() < 0 or samples.max() > full:
        raise FormatError(f"{path}: samples exceed {full}")
    return samples, full


def load_band(path, domain: Domain = Domain.UNIT) -> BandImage:
    """Read a single-channel 8/16-bit PNG or PGM into ``domain``.

    Samples are mapped affinely: ``0`` goes to the lower bound and the
    format's full-scale value to the upper bound.
    """
    samples, full = _read_samples(path)
    lo, hi = domain.bounds
    return BandImage(lo + (hi - lo) * (samples / full), domain)


def save_band(img: BandImage, path, bits: int = 8) -> None:
    """Write ``img`` as a grayscale PNG (or PGM by extension); inverse of load_band."""
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    lo, hi = img.domain.bounds
    full = (1 << bits) - 1
    samples = np.rint((img.values - lo) / (hi - lo) * full)
    dtype = np.uint8 if bits == 8 else np.uint16
    Image.fromarray(samples.astype(dtype)).save(path)


def load_mask(path) -> BinaryMask:
    samples, _ = _read_samples(path)
    return BinaryMask(samples != 0)


def save_mask(mask: BinaryMask, path) -> None:
    Image.fromarray(mask.values.astype(np.uint8) * 255).save(path)


def load_frame(directory, bands: Iterable[BandName], domain: Domain = Domain.UNIT) -> MultispectralFrame:
    directory = Path(directory)
    loaded = {b: load_band(directory / f"{b.value}.png", domain) for b in bands}
    return MultispectralFrame(directory.name, loaded)


# -- LMSK v1 -----------------------------------------------------------------

_LMSK_MAGIC = b"LMSK"


def save_likelihood(mask: LikelihoodMask, path) -> None:
    h, w = mask.shape
    header = f"LMSK 1 {w} {h}\n".encode("ascii")
    payload = np.ascontiguousarray(mask.values, dtype="<f4").tobytes()
    tmp = Path(f"{path}.tmp{os.getpid()}")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def load_likelihood(path) -> LikelihoodMask:
    with open(path, "rb") as fh:
        blob = fh.read()
    nl = blob.find(b"\n")
    if nl < 0 or not blob.startswith(_LMSK_MAGIC + b" "):
        raise FormatError(f"{path}: missing LMSK header")
    fields_ = blob[:nl].split(b" ")
    if len(fields_) != 4 or fields_[1] != b"1":
        raise FormatError(f"{path}: bad LMSK header {blob[:nl]!r}")
    try:
        w, h = int(fields_[2]), int(fields_[3])
    except ValueError:
        raise FormatError(f"{path}: bad LMSK dimensions") from None
    if w < 1 or h < 1:
        raise FormatError(f"{path}: zero-sized LMSK")
    payload = blob[nl + 1 :]
    if len(payload) != 4 * w * h:
        raise FormatError(f"{path}: payload is {len(payload)} bytes, expected {4 * w * h}")
    values = np.frombuffer(payload, dtype="<f4").reshape(h, w)
    if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
        raise OutOfRange(f"{path}: likelihood values outside [0, 1]")
    return LikelihoodMask(values.astype(np.float32))


# -- resampling ----------------------------------------------------------------


def _axis_weights(n_src: int, n_dst: int):
    # center-aligned sample positions, clamped to the source grid
    pos = (np.arange(n_dst) + 0.5) * (n_src / n_dst) - 0.5
    pos = np.clip(pos, 0.0, n_src - 1)
    i0 = np.floor(pos).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_src - 1)
    t = pos - i0
    return i0, i1, t


def _resample(values: np.ndarray, new_h: int, new_w: int) -> np.ndarray:
    h, w = values.shape
    r0, r1, tr = _axis_weights(h, new_h)
    c0, c1, tc = _axis_weights(w, new_w)
    rows = values[r0] + tr[:, None] * (values[r1] - values[r0])
    out = rows[:, c0] + tc[None, :] * (rows[:, c1] - rows[:, c0])
    return np.clip(out, values.min(), values.max())


def resize_bilinear(img: BandImage, new_w: int, new_h: int) -> BandImage:
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target size must be positive, got {new_w}x{new_h}")
    if (new_h, new_w) == img.shape:
        return img
    return BandImage(_resample(img.values, new_h, new_w), img.domain)


def resize_mask(mask: BinaryMask, new_w: int, new_h: int) -> BinaryMask:
    """Bilinear resample of the 0/1 grid, re-binarized at 0.5."""
    if (new_h, new_w) == mask.shape:
        return mask
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target size must be positive, got {new_w}x{new_h}")
    return BinaryMask(_resample(mask.values.astype(np.float64), new_h, new_w) >= 0.5)
