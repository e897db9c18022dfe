"""Deterministic synthetic crop-row scenes with exact ground truth."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import GT_FILE, DatasetManifest, scan_dataset
from .errors import ConfigError
from .imagecore import BandImage, BandName, BinaryMask, Domain, MultispectralFrame, save_band, save_mask

SCENE_BANDS = (BandName.RED, BandName.GREEN, BandName.BLUE, BandName.NIR)
PARAMS_FILE = "scene.txt"


@dataclass(frozen=True)
class SceneParams:
    """Scene layout and per-class reflectances.

    Rows are parallel bands ``row_width`` pixels wide whose direction is
    ``row_angle`` degrees from the image vertical.  Plants are disks of
    diameter ``row_width`` placed edge to edge along each row centerline;
    each slot is occupied with probability ``plant_density``.
    """

    width: int = 240
    height: int = 240
    row_count: int = 4
    row_angle: float = 0.0
    row_width: float = 30.0
    plant_density: float = 0.8
    nir_plant: float = 0.8
    nir_soil: float = 0.3
    red_plant: float = 0.1
    red_soil: float = 0.25
    green_plant: float = 0.45
    green_soil: float = 0.3
    blue_plant: float = 0.1
    blue_soil: float = 0.2
    noise_sigma: float = 0.02
    seed: int = 0
    plants_only: bool = False

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError("scene dimensions must be positive")
        if self.row_count < 1:
            raise ConfigError("row_count must be >= 1")
        if not 0 < self.row_width < self.width:
            raise ConfigError("row_width must lie in (0, width)")
        if not 0.0 <= self.plant_density <= 1.0:
            raise ConfigError("plant_density must lie in [0, 1]")
        if not self.nir_plant > self.nir_soil:
            raise ConfigError("vegetation must reflect more NIR than soil")
        if not self.red_plant < self.red_soil:
            raise ConfigError("vegetation must reflect less red than soil")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        for name in ("nir", "red", "green", "blue"):
            for cls in ("plant", "soil"):
                v = getattr(self, f"{name}_{cls}")
                if not 0.0 <= v <= 1.0:
                    raise ConfigError(f"{name}_{cls} must lie in [0, 1]")

    def reflectance(self, band: BandName, plant: bool) -> float:
        stem = {BandName.RED: "red", BandName.GREEN: "green", BandName.BLUE: "blue", BandName.NIR: "nir"}[band]
        return getattr(self, f"{stem}_{'plant' if plant else 'soil'}")

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in dataclasses.fields(self))

    @classmethod
    def from_text(cls, text: str) -> "SceneParams":
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition("=")
            if key not in kinds:
                raise ConfigError(f"unknown scene parameter {key!r}")
            kind = kinds[key]
            if kind == "bool":
                values[key] = raw == "True"
            elif kind == "int":
                values[key] = int(raw)
            else:
                values[key] = float(raw)
        return cls(**values)


def scene_layout(p: SceneParams) -> tuple[np.ndarray, np.ndarray]:
    """Boolean ``(plants, row_bands)`` masks for ``p``."""
    theta = math.radians(p.row_angle)
    # unit vectors in (x, y) image coordinates, y pointing down
    ux, uy = math.sin(theta), math.cos(theta)
    nx, ny = math.cos(theta), -math.sin(theta)
    extent = p.width * abs(nx) + p.height * abs(ny)
    if p.row_count * p.row_width > extent:
        raise ConfigError(
            f"{p.row_count} rows of width {p.row_width} do not fit across {extent:.1f}px"
        )
    spacing = extent / p.row_count
    radius = p.row_width / 2.0

    y, x = np.mgrid[0 : p.height, 0 : p.width].astype(np.float64)
    x -= p.width / 2.0 - 0.5
    y -= p.height / 2.0 - 0.5
    across = x * nx + y * ny
    along = x * ux + y * uy

    row = np.clip(np.floor((across + extent / 2.0) / spacing), 0, p.row_count - 1).astype(np.intp)
    offset = across - (-extent / 2.0 + (row + 0.5) * spacing)
    bands = np.abs(offset) <= radius

    rng = np.random.default_rng(p.seed)
    half_span = math.hypot(p.width, p.height) / 2.0
    n_slots = int(math.ceil(half_span / (2.0 * radius))) + 2
    occupied = rng.random((p.row_count, 2 * n_slots + 1)) < p.plant_density
    phase = rng.random(p.row_count) * 2.0 * radius

    slot = np.rint((along - phase[row]) / (2.0 * radius)).astype(np.intp)
    d_along = along - (phase[row] + slot * 2.0 * radius)
    in_disk = offset**2 + d_along**2 <= radius**2
    plants = in_disk & occupied[row, np.clip(slot + n_slots, 0, 2 * n_slots)] & bands
    return plants, bands


def generate_scene(p: SceneParams) -> tuple[MultispectralFrame, BinaryMask]:
    plants, bands = scene_layout(p)
    noise_rng = np.random.default_rng([p.seed, 1])
    layers = {}
    for name in SCENE_BANDS:
        v = np.where(plants, p.reflectance(name, True), p.reflectance(name, False))
        if p.noise_sigma > 0:
            v = np.clip(v + noise_rng.normal(0.0, p.noise_sigma, v.shape), 0.0, 1.0)
        layers[name] = BandImage(v, Domain.UNIT)
    gt = BinaryMask(plants if p.plants_only else bands)
    return MultispectralFrame(f"seed{p.seed}", layers), gt


def frame_name(i: int) -> str:
    return f"f{i:04d}"


def generate_dataset(p: SceneParams, n: int, root) -> DatasetManifest:
    """Write ``n`` scenes (seeds ``p.seed + i``) in the dataset layout."""
    if n < 1:
        raise ConfigError("need at least one frame")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / PARAMS_FILE).write_text(p.to_text())
    for i in range(n):
        frame, gt = generate_scene(dataclasses.replace(p, seed=p.seed + i))
        d = root / frame_name(i)
        d.mkdir(exist_ok=True)
        for name in SCENE_BANDS:
            save_band(frame[name], d / f"{name.value}.png")
        save_mask(gt, d / GT_FILE)
    return scan_dataset(root, SCENE_BANDS)
