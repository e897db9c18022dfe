"""Experiment runner: method x input x fusion over datasets, with reports."""

from __future__ import annotations

import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import bandmath
from .datasets import (
    DatasetManifest,
    cross_val_folds,
    pair_external_likelihoods,
    scan_dataset,
    split_train_test,
)
from .errors import ConfigError, CropFuseError, FrameError
from .fuse import FusionWeights, early_fuse_mean, late_fuse
from .imagecore import (
    RGB_BANDS,
    BandImage,
    BandName,
    BinaryMask,
    LikelihoodMask,
    MultispectralFrame,
    load_band,
    load_mask,
    resize_bilinear,
    resize_mask,
    save_mask,
)
from .metrics import MetricsReport, aggregate, aggregate_micro, evaluate
from .segclassic import (
    EdgeParams,
    RegionParams,
    apply_threshold,
    edge_segment,
    otsu_segment,
    region_segment,
    to_likelihood,
)

log = logging.getLogger(__name__)

CLASSICAL = ("otsu", "edge", "region")
METHODS = CLASSICAL + ("external",)
INPUTS = ("rgb", "ndvi", "early", "late")
CSV_HEADER = "dataset,method,input,acc,f1,iou,n_frames,aggregation"

_INPUT_BANDS = {
    "rgb": RGB_BANDS,
    "ndvi": (BandName.RED, BandName.NIR),
    "early": RGB_BANDS + (BandName.NIR,),
    "late": RGB_BANDS + (BandName.NIR,),
}


@dataclass(frozen=True)
class ExperimentConfig:
    data: tuple[Path, ...]
    method: str = "otsu"
    input: str = "ndvi"
    weights: FusionWeights = FusionWeights()
    threshold: float = 0.5
    edge: EdgeParams = EdgeParams()
    region: RegionParams = RegionParams()
    polarity: str = "bright"
    pred_dirs: tuple[Path, ...] = ()
    seed: int = 0
    train_fraction: float = 0.8
    eval_all: bool = False
    cross_val: bool = False
    size: int = 240
    strict: bool = True
    workers: int = 1
    dump_dir: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(Path(d) for d in self.data))
        object.__setattr__(self, "pred_dirs", tuple(Path(d) for d in self.pred_dirs))
        if not self.data:
            raise ConfigError("at least one dataset root is required")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.input not in INPUTS:
            raise ConfigError(f"unknown input {self.input!r}; choose from {', '.join(INPUTS)}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.polarity not in ("bright", "dark"):
            raise ConfigError("polarity must be 'bright' or 'dark'")
        if self.size < 0 or self.workers < 1:
            raise ConfigError("size must be >= 0 and workers >= 1")
        if self.method == "external":
            need = 2 if self.input == "late" else 1
            if len(self.pred_dirs) != need:
                raise ConfigError(
                    f"external {self.input} needs {need} --pred-dir source(s), got {len(self.pred_dirs)}"
                    + (" (NDVI branch first, RGB branch second)" if need == 2 else "")
                )
        elif self.pred_dirs:
            raise ConfigError("--pred-dir only applies to --method external")
        if self.cross_val and len(self.data) < 2:
            raise ConfigError("cross-validation needs at least 2 datasets")

    @property
    def label(self) -> str:
        return f"{self.method}/{self.input}"


@dataclass
class CellResult:
    """One (dataset, method, input) evaluation unit."""

    dataset: str
    method: str
    input: str
    frames: list[str] = field(default_factory=list)
    reports: list[MetricsReport] = field(default_factory=list)
    macro: MetricsReport | None = None
    micro: MetricsReport | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _segmenter(cfg: ExperimentConfig) -> Callable[[BandImage], BinaryMask]:
    if cfg.method == "otsu":
        def seg(img):
            mask = otsu_segment(img)[1]
            return mask if cfg.polarity == "bright" else BinaryMask(~mask.values)
        return seg
    if cfg.method == "edge":
        return lambda img: edge_segment(img, cfg.edge)
    return lambda img: region_segment(img, cfg.region)


def _load_frame(cfg: ExperimentConfig, m: DatasetManifest, fid: str) -> MultispectralFrame:
    bands = {}
    for b in _INPUT_BANDS[cfg.input]:
        img = load_band(m.frame_dir(fid) / f"{b.value}.png")
        if cfg.size:
            img = resize_bilinear(img, cfg.size, cfg.size)
        bands[b] = img
    return MultispectralFrame(fid, bands)


def classical_likelihood(cfg: ExperimentConfig, frame: MultispectralFrame) -> LikelihoodMask:
    """Likelihood mask of one frame for a classical method and input mode."""
    seg = _segmenter(cfg)
    if cfg.input == "rgb":
        return to_likelihood(seg(bandmath.grayscale(frame)))
    if cfg.input == "ndvi":
        return to_likelihood(seg(bandmath.ndvi_unit(frame)))
    gray, nd = bandmath.grayscale(frame), bandmath.ndvi_unit(frame)
    if cfg.input == "early":
        return to_likelihood(seg(early_fuse_mean(nd, gray)))
    return late_fuse(to_likelihood(seg(nd)), to_likelihood(seg(gray)), cfg.weights)


def check_sources(cfg: ExperimentConfig) -> None:
    """Raise ConfigError when ``late`` cannot resolve both likelihood sources.

    External sources are checked by the config itself; classical sources
    need NDVI bands (nir, r) and RGB bands present in the datasets.
    """
    if cfg.method == "external" or cfg.input != "late":
        return
    for root in cfg.data:
        m = scan_dataset(root, (), strict=False)
        first = m.frame_dir(m.frames[0])
        absent = [b.name for b in _INPUT_BANDS["late"] if not (first / f"{b.value}.png").is_file()]
        if absent:
            raise ConfigError(
                f"late fusion needs an NDVI source and an RGB source; dataset {m.name} lacks "
                + ", ".join(absent)
            )


def _scan(cfg: ExperimentConfig, root: Path) -> DatasetManifest:
    bands = () if cfg.method == "external" else _INPUT_BANDS[cfg.input]
    return scan_dataset(root, bands, strict=cfg.strict)


def _eval_units(cfg: ExperimentConfig) -> list[tuple[DatasetManifest, list[str]]]:
    manifests = [_scan(cfg, root) for root in cfg.data]
    if cfg.cross_val:
        # unsupervised/external predictions ignore the training fields
        return [(test, list(test.frames)) for _, test in cross_val_folds(manifests)]
    if cfg.eval_all:
        return [(m, list(m.frames)) for m in manifests]
    return [(m, list(split_train_test(m, cfg.train_fraction, cfg.seed).test)) for m in manifests]


def _process(cfg, m, fid, externals) -> tuple[MetricsReport, BinaryMask]:
    try:
        gt = load_mask(m.gt_path(fid))
        if cfg.size:
            gt = resize_mask(gt, cfg.size, cfg.size)
        if cfg.method == "external":
            qs = [ext[fid] for ext in externals]
            q = qs[0] if len(qs) == 1 else late_fuse(qs[0], qs[1], cfg.weights)
        else:
            q = classical_likelihood(cfg, _load_frame(cfg, m, fid))
        pred = apply_threshold(q, cfg.threshold)
        return evaluate(pred, gt), pred
    except (CropFuseError, OSError, ValueError) as exc:
        raise FrameError(fid, exc) from exc


def _run_unit(cfg: ExperimentConfig, m: DatasetManifest, frames: list[str]) -> CellResult:
    cell = CellResult(m.name, cfg.method, cfg.input)
    frames = sorted(frames)
    try:
        externals = []
        if cfg.method == "external":
            shape = (cfg.size, cfg.size) if cfg.size else None
            for d in cfg.pred_dirs:
                masks, _ = pair_external_likelihoods(m, d, frames, strict=True, expected_shape=shape)
                externals.append(masks)
        work = lambda fid: _process(cfg, m, fid, externals)
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                outputs = list(pool.map(work, frames))
        else:
            outputs = [work(fid) for fid in frames]
    except CropFuseError as exc:
        cell.error = str(exc)
        log.error("%s %s: %s", m.name, cfg.label, exc)
        return cell
    cell.frames = frames
    cell.reports = [rep for rep, _ in outputs]
    cell.macro = aggregate(cell.reports)
    cell.micro = aggregate_micro(cell.reports)
    if cfg.dump_dir is not None:
        out = Path(cfg.dump_dir) / m.name / f"{cfg.method}_{cfg.input}"
        out.mkdir(parents=True, exist_ok=True)
        for fid, (_, pred) in zip(frames, outputs):
            save_mask(pred, out / f"{fid}.png")
    return cell


def run_experiment(cfg: ExperimentConfig) -> list[CellResult]:
    """Evaluate one (method, input) configuration on every dataset.

    Dataset scanning and configuration problems raise; per-frame failures
    are recorded on the affected cell.
    """
    check_sources(cfg)
    return [_run_unit(cfg, m, frames) for m, frames in _eval_units(cfg)]


def run_matrix(cfgs: Sequence[ExperimentConfig]) -> list[CellResult]:
    if not cfgs:
        raise ConfigError("empty experiment matrix")
    cells = []
    for cfg in cfgs:
        try:
            cells.extend(run_experiment(cfg))
        except CropFuseError as exc:
            log.error("%s: %s", cfg.label, exc)
            for root in cfg.data:
                cells.append(CellResult(root.name, cfg.method, cfg.input, error=str(exc)))
    return cells


# -- reports -------------------------------------------------------------------


def pct(v: float) -> str:
    return f"{100.0 * v:.1f}"


def format_csv(cells: Sequence[CellResult]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for c in cells:
        if not c.ok:
            buf.write(f"{c.dataset},{c.method},{c.input},,,,0,failed\n")
            continue
        for kind, rep in (("macro", c.macro), ("micro", c.micro)):
            buf.write(
                f"{c.dataset},{c.method},{c.input},{pct(rep.acc)},{pct(rep.f1)},{pct(rep.iou)},"
                f"{len(c.frames)},{kind}\n"
            )
    return buf.getvalue()


def _rank_marks(values: list[str | None]) -> list[str]:
    """Markdown emphasis for best (bold) and second-best (underline)."""
    distinct = sorted({float(v) for v in values if v is not None}, reverse=True)
    out = []
    for v in values:
        if v is None:
            out.append("n/a")
        elif float(v) == distinct[0] and len(distinct) > 1:
            out.append(f"**{v}**")
        elif len(distinct) > 2 and float(v) == distinct[1]:
            out.append(f"<u>{v}</u>")
        else:
            out.append(v)
    return out


def format_markdown(cells: Sequence[CellResult]) -> str:
    """One table per dataset; best/second-best marked within each method block."""
    lines = []
    datasets = list(dict.fromkeys(c.dataset for c in cells))
    for ds in datasets:
        rows = [c for c in cells if c.dataset == ds]
        lines += [
            f"### {ds}",
            "",
            "| Method | Input | Acc | F1 | IoU | Acc (micro) | F1 (micro) | IoU (micro) | Frames |",
            "|---|---|---|---|---|---|---|---|---|",
        ]
        for method in dict.fromkeys(c.method for c in rows):
            block = [c for c in rows if c.method == method]
            cols = []
            for attr in ("acc", "f1", "iou"):
                cols.append(_rank_marks([pct(getattr(c.macro, attr)) if c.ok else None for c in block]))
            for i, c in enumerate(block):
                if c.ok:
                    micro = [pct(c.micro.acc), pct(c.micro.f1), pct(c.micro.iou)]
                    n = str(len(c.frames))
                else:
                    micro, n = ["n/a"] * 3, "failed"
                cells_ = [c.method, c.input, cols[0][i], cols[1][i], cols[2][i], *micro, n]
                lines.append("| " + " | ".join(cells_) + " |")
        lines.append("")
    return "\n".join(lines)
