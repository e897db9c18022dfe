"""Dataset directories, deterministic splits and external likelihood pairing.

A dataset is a directory of frame directories::

    <dataset>/<frame_id>/<band>.png
    <dataset>/<frame_id>/gt.png
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from PIL import Image

from .errors import DimensionMismatch, EmptyDataset, FormatError, IncompleteFrame, MissingMask
from .imagecore import BandName, LikelihoodMask, load_likelihood

log = logging.getLogger(__name__)

GT_FILE = "gt.png"


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    root: Path
    frames: tuple[str, ...]
    band_set: tuple[BandName, ...]
    gt_present: bool
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.frames)) != len(self.frames):
            raise ValueError("frame ids must be unique")

    def __len__(self) -> int:
        return len(self.frames)

    def frame_dir(self, frame_id: str) -> Path:
        return self.root / frame_id

    def gt_path(self, frame_id: str) -> Path:
        return self.root / frame_id / GT_FILE


def scan_dataset(
    root, band_set: Iterable[BandName], strict: bool = True, require_gt: bool = True
) -> DatasetManifest:
    """List complete frames of ``root`` in lexicographic order.

    In strict mode the first incomplete frame raises :class:`IncompleteFrame`;
    otherwise incomplete frames are skipped and described in ``warnings``.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} is not a directory")
    bands = tuple(band_set)
    frames, warnings, all_gt = [], [], True
    for d in sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name):
        missing: list = [b for b in bands if not (d / f"{b.value}.png").is_file()]
        has_gt = (d / GT_FILE).is_file()
        if require_gt and not has_gt:
            missing.append("gt")
        if missing:
            err = IncompleteFrame(d.name, missing)
            if strict:
                raise err
            warnings.append(str(err))
            log.warning("skipping %s", err)
            continue
        all_gt &= has_gt
        frames.append(d.name)
    if not frames:
        raise EmptyDataset(f"no complete frames under {root}")
    return DatasetManifest(root.name, root, tuple(frames), bands, all_gt, tuple(warnings))


@dataclass(frozen=True)
class SplitSpec:
    train: tuple[str, ...]
    test: tuple[str, ...]
    seed: int
    fraction: float

    def serialize(self) -> str:
        lines = [f"SPLIT {self.seed} {self.fraction!r}"]
        lines += [f"train {fid}" for fid in self.train]
        lines += [f"test {fid}" for fid in self.test]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "SplitSpec":
        lines = text.splitlines()
        head = lines[0].split() if lines else []
        if len(head) != 3 or head[0] != "SPLIT":
            raise FormatError("split file must start with 'SPLIT <seed> <fraction>'")
        train, test = [], []
        for line in lines[1:]:
            if not line.strip():
                continue
            kind, _, fid = line.partition(" ")
            if kind == "train":
                train.append(fid)
            elif kind == "test":
                test.append(fid)
            else:
                raise FormatError(f"bad split line {line!r}")
        return cls(tuple(train), tuple(test), int(head[1]), float(head[2]))


def train_size(n: int, train_fraction: float) -> int:
    # exact decimal product so that e.g. 0.29 * 100 floors to 29
    return math.floor(Fraction(repr(float(train_fraction))) * n)


def split_train_test(m: DatasetManifest, train_fraction: float = 0.8, seed: int = 0) -> SplitSpec:
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(m.frames)
    if n < 2:
        raise EmptyDataset(f"need at least 2 frames to split, {m.name} has {n}")
    order = sorted(m.frames)
    rng = random.Random(seed)
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        order[i], order[j] = order[j], order[i]
    k = train_size(n, train_fraction)
    return SplitSpec(tuple(sorted(order[:k])), tuple(sorted(order[k:])), seed, float(train_fraction))


def cross_val_folds(
    manifests: Sequence[DatasetManifest],
) -> list[tuple[list[DatasetManifest], DatasetManifest]]:
    """Leave-one-dataset-out folds in input order."""
    if len(manifests) < 2:
        raise ValueError("cross-validation needs at least 2 datasets")
    return [
        ([m for j, m in enumerate(manifests) if j != i], held_out)
        for i, held_out in enumerate(manifests)
    ]


def frame_shape(m: DatasetManifest, frame_id: str) -> tuple[int, int]:
    """(height, width) of a frame, read from the file headers only."""
    d = m.frame_dir(frame_id)
    candidates = [d / f"{b.value}.png" for b in m.band_set] + [d / GT_FILE]
    for path in candidates:
        if path.is_file():
            with Image.open(path) as im:
                return im.height, im.width
    raise FormatError(f"frame {frame_id} has no readable image")


def pair_external_likelihoods(
    m: DatasetManifest,
    mask_dir,
    frames: Sequence[str] | None = None,
    strict: bool = True,
    expected_shape: tuple[int, int] | None = None,
) -> tuple[dict[str, LikelihoodMask], list[str]]:
    """Match ``<mask_dir>/<frame_id>.lmsk`` files to frames.

    Returns the matched masks and the list of frames without a mask.  Each
    mask must match ``expected_shape`` (or the frame's own size).
    """
    mask_dir = Path(mask_dir)
    wanted = list(m.frames if frames is None else frames)
    masks, unmatched = {}, []
    for fid in wanted:
        path = mask_dir / f"{fid}.lmsk"
        if not path.is_file():
            if strict:
                raise MissingMask(f"no likelihood mask for frame {fid} in {mask_dir}")
            unmatched.append(fid)
            continue
        q = load_likelihood(path)
        shape = expected_shape or frame_shape(m, fid)
        if q.shape != tuple(shape):
            raise DimensionMismatch(f"frame {fid}: mask is {q.shape}, frame is {tuple(shape)}")
        masks[fid] = q
    if unmatched:
        log.warning("%d frame(s) without external masks: %s", len(unmatched), ", ".join(unmatched))
    return masks, unmatched
