"""Command line interface: ``cropfuse {synth,segment,fuse,eval,split,bench}``.

Failures print one ``error: <kind>: <message>`` line on stderr.  Exit codes:
0 success, 1 runtime failure (including failed bench cells), 2 usage error.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

from . import bandmath
from .bench import (
    CLASSICAL,
    INPUTS,
    METHODS,
    ExperimentConfig,
    check_sources,
    classical_likelihood,
    format_csv,
    format_markdown,
    run_matrix,
)
from .datasets import scan_dataset, split_train_test
from .errors import ConfigError, CropFuseError
from .fuse import FusionWeights, early_fuse_mean, early_fuse_stack, export_stack, late_fuse
from .imagecore import (
    BandName,
    load_frame,
    load_likelihood,
    load_mask,
    save_band,
    save_likelihood,
    save_mask,
)
from .metrics import evaluate
from .segclassic import EdgeParams, RegionParams, apply_threshold, to_likelihood
from .synthgen import SCENE_BANDS, SceneParams, generate_dataset

USAGE_EXIT = 2
FAIL_EXIT = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _choices(allowed, aliases):
    def parse(text: str) -> list[str]:
        out = []
        for tok in text.split(","):
            tok = tok.strip()
            if tok in aliases:
                out.extend(aliases[tok])
            elif tok in allowed:
                out.append(tok)
            else:
                raise argparse.ArgumentTypeError(
                    f"invalid choice {tok!r} (choose from {', '.join(allowed + tuple(aliases))})"
                )
        return list(dict.fromkeys(out))

    return parse


def _add_segmenter_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("segmenter parameters")
    g.add_argument("--sigma", type=float, default=1.4, help="Canny Gaussian sigma (default: %(default)s)")
    g.add_argument("--high-quantile", type=float, default=0.9,
                   help="gradient quantile used as the Canny high threshold (default: %(default)s)")
    g.add_argument("--low-ratio", type=float, default=0.5,
                   help="Canny low threshold as a fraction of the high one (default: %(default)s)")
    g.add_argument("--min-object-px", type=int, default=64,
                   help="area floor for edge-based objects, pixels (default: %(default)s)")
    g.add_argument("--bg-level", type=float, default=0.3,
                   help="watershed background marker level (default: %(default)s)")
    g.add_argument("--fg-level", type=float, default=0.7,
                   help="watershed foreground marker level (default: %(default)s)")
    g.add_argument("--absolute-markers", action="store_true",
                   help="compare marker levels with raw intensities instead of the image's range")
    g.add_argument("--polarity", choices=("bright", "dark"), default="bright",
                   help="Otsu foreground side of the threshold (default: %(default)s)")


def _add_weight_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None,
                   help="late-fusion weight of the NDVI branch (default: 0.5, or 1 - beta)")
    p.add_argument("--beta", type=float, default=None,
                   help="late-fusion weight of the RGB branch (default: 0.5, or 1 - alpha)")


def _weights(args) -> FusionWeights:
    a, b = args.alpha, args.beta
    if a is None and b is None:
        return FusionWeights(0.5, 0.5)
    if a is None:
        a = 1.0 - b
    if b is None:
        b = 1.0 - a
    return FusionWeights(a, b)


def _edge(args) -> EdgeParams:
    return EdgeParams(args.sigma, args.low_ratio, args.high_quantile, args.min_object_px)


def _region(args) -> RegionParams:
    return RegionParams(args.bg_level, args.fg_level, relative=not args.absolute_markers)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cropfuse", description="Multispectral crop-row segmentation toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write a synthetic crop-row dataset")
    s.add_argument("--n", type=int, default=10, help="number of frames (default: %(default)s)")
    s.add_argument("--out", type=Path, required=True, help="dataset root to create")
    d = SceneParams()
    for flag, attr, kind in (
        ("--seed", "seed", int), ("--width", "width", int), ("--height", "height", int),
        ("--rows", "row_count", int), ("--row-angle", "row_angle", float),
        ("--row-width", "row_width", float), ("--density", "plant_density", float),
        ("--noise", "noise_sigma", float),
        ("--nir-plant", "nir_plant", float), ("--nir-soil", "nir_soil", float),
        ("--red-plant", "red_plant", float), ("--red-soil", "red_soil", float),
        ("--green-plant", "green_plant", float), ("--green-soil", "green_soil", float),
        ("--blue-plant", "blue_plant", float), ("--blue-soil", "blue_soil", float),
    ):
        s.add_argument(flag, dest=attr, type=kind, default=getattr(d, attr),
                       help=f"{attr.replace('_', ' ')} (default: %(default)s)")
    s.add_argument("--plants-only", action="store_true",
                   help="ground truth marks plants instead of whole row bands")

    g = sub.add_parser("segment", help="segment one frame directory with a classical method")
    g.add_argument("--frame", type=Path, required=True, help="frame directory with <band>.png files")
    g.add_argument("--method", choices=CLASSICAL, default="otsu", help="(default: %(default)s)")
    g.add_argument("--input", choices=INPUTS, default="ndvi", help="(default: %(default)s)")
    g.add_argument("--threshold", type=_unit, default=0.5, help="decision threshold T (default: %(default)s)")
    g.add_argument("--out", type=Path, required=True, help="output mask PNG")
    g.add_argument("--lmsk", type=Path, default=None, help="also write the likelihood mask (LMSK)")
    _add_weight_flags(g)
    _add_segmenter_flags(g)

    f = sub.add_parser("fuse", help="early (mean/stack) or late fusion")
    f.add_argument("--mode", choices=("early", "stack", "late"), required=True)
    f.add_argument("--frame", type=Path, help="frame directory (early, stack)")
    f.add_argument("--a", type=Path, help="NDVI-branch likelihood .lmsk (late)")
    f.add_argument("--b", type=Path, help="RGB-branch likelihood .lmsk (late)")
    f.add_argument("--out", type=Path, required=True,
                   help="early: PNG path; stack: output root; late: .lmsk path")
    _add_weight_flags(f)

    e = sub.add_parser("eval", help="score one prediction against ground truth")
    e.add_argument("--pred", type=Path, required=True, help="prediction (.lmsk likelihood or binary PNG)")
    e.add_argument("--gt", type=Path, required=True, help="ground-truth PNG (nonzero = positive)")
    e.add_argument("--t", "--threshold", dest="threshold", type=_unit, default=0.5,
                   help="decision threshold T (default: %(default)s)")

    sp = sub.add_parser("split", help="write the deterministic train/test split of a dataset")
    sp.add_argument("--data", type=Path, required=True)
    sp.add_argument("--train-fraction", type=float, default=0.8, help="(default: %(default)s)")
    sp.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    sp.add_argument("--out", type=Path, default=None, help="split file (default: stdout)")

    b = sub.add_parser("bench", help="run the method x input matrix and print a report")
    b.add_argument("--data", type=Path, action="append", required=True,
                   help="dataset root; repeat for several datasets")
    b.add_argument("--method", type=_choices(METHODS, {"classical": CLASSICAL, "all": CLASSICAL}),
                   default=["otsu"], help="comma list of otsu,edge,region,external or 'classical' (default: otsu)")
    b.add_argument("--input", type=_choices(INPUTS, {"all": INPUTS}), default=["ndvi"],
                   help="comma list of rgb,ndvi,early,late or 'all' (default: ndvi)")
    _add_weight_flags(b)
    b.add_argument("--threshold", type=_unit, default=0.5, help="decision threshold T (default: %(default)s)")
    b.add_argument("--seed", type=int, default=0, help="split seed (default: %(default)s)")
    b.add_argument("--train-fraction", type=float, default=0.8, help="(default: %(default)s)")
    b.add_argument("--eval-all", action="store_true", help="evaluate every frame, not just the test split")
    b.add_argument("--cross-val", action="store_true", help="leave-one-dataset-out folds over --data roots")
    b.add_argument("--pred-dir", type=Path, action="append", default=[],
                   help="external likelihood directory of <frame_id>.lmsk; give two for late (NDVI, then RGB)")
    b.add_argument("--size", type=int, default=240, help="evaluation size in pixels, 0 = native (default: %(default)s)")
    b.add_argument("--workers", type=int, default=1, help="frame worker threads (default: %(default)s)")
    b.add_argument("--strict", action="store_true", help="fail on incomplete frames instead of skipping them")
    b.add_argument("--format", choices=("csv", "md"), default="csv", help="(default: %(default)s)")
    b.add_argument("--out", type=Path, default=None, help="report file (default: stdout)")
    b.add_argument("--dump-dir", type=Path, default=None, help="write predicted masks here")
    _add_segmenter_flags(b)
    return parser


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def cmd_synth(args) -> int:
    names = [k for k in vars(SceneParams()) if k != "plants_only"]
    params = SceneParams(**{k: getattr(args, k) for k in names}, plants_only=args.plants_only)
    m = generate_dataset(params, args.n, args.out)
    print(f"wrote {len(m)} frames to {args.out}")
    return 0


def _segment_cfg(args) -> ExperimentConfig:
    return ExperimentConfig(
        data=(args.frame.parent,), method=args.method, input=args.input, weights=_weights(args),
        threshold=args.threshold, edge=_edge(args), region=_region(args), polarity=args.polarity,
    )


def cmd_segment(args) -> int:
    cfg = _segment_cfg(args)
    bands = SCENE_BANDS if args.input in ("early", "late") else (
        (BandName.RED, BandName.GREEN, BandName.BLUE) if args.input == "rgb" else (BandName.RED, BandName.NIR)
    )
    frame = load_frame(args.frame, bands)
    q = classical_likelihood(cfg, frame)
    mask = apply_threshold(q, args.threshold)
    save_mask(mask, args.out)
    if args.lmsk is not None:
        save_likelihood(q, args.lmsk)
    print(f"frame={frame.frame_id} method={args.method} input={args.input} "
          f"positives={int(mask.values.sum())} pixels={mask.values.size}")
    return 0


def cmd_fuse(args) -> int:
    if args.mode == "late":
        if args.a is None or args.b is None:
            raise UsageError("late fusion needs --a and --b likelihood sources")
        q = late_fuse(load_likelihood(args.a), load_likelihood(args.b), _weights(args))
        save_likelihood(q, args.out)
        return 0
    if args.frame is None:
        raise UsageError(f"{args.mode} fusion needs --frame")
    frame = load_frame(args.frame, SCENE_BANDS)
    if args.mode == "early":
        fused = early_fuse_mean(bandmath.ndvi_unit(frame), bandmath.grayscale(frame))
        save_band(fused, args.out, bits=16)
    else:
        nd = bandmath.ndvi(frame[BandName.NIR], frame[BandName.RED])
        export_stack(early_fuse_stack(frame, nd), args.out)
    return 0


def cmd_eval(args) -> int:
    if args.pred.suffix.lower() == ".lmsk":
        q = load_likelihood(args.pred)
    else:
        q = to_likelihood(load_mask(args.pred))
    rep = evaluate(apply_threshold(q, args.threshold), load_mask(args.gt))
    c = rep.counts
    print(f"acc={rep.acc:.6f} f1={rep.f1:.6f} iou={rep.iou:.6f} "
          f"tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn}")
    return 0


def cmd_split(args) -> int:
    m = scan_dataset(args.data, (), strict=False, require_gt=False)
    _emit(split_train_test(m, args.train_fraction, args.seed).serialize(), args.out)
    return 0


def cmd_bench(args) -> int:
    common = dict(
        data=tuple(args.data), weights=_weights(args), threshold=args.threshold, edge=_edge(args),
        region=_region(args), polarity=args.polarity, pred_dirs=tuple(args.pred_dir), seed=args.seed,
        train_fraction=args.train_fraction, eval_all=args.eval_all, cross_val=args.cross_val,
        size=args.size, strict=args.strict, workers=args.workers, dump_dir=args.dump_dir,
    )
    # validate every cell up front so usage problems fail fast
    cfgs = [ExperimentConfig(method=m, input=i, **common)
            for m, i in itertools.product(args.method, args.input)]
    for cfg in cfgs:
        check_sources(cfg)
    cells = run_matrix(cfgs)
    text = format_csv(cells) if args.format == "csv" else format_markdown(cells)
    _emit(text, args.out)
    failed = [c for c in cells if not c.ok]
    for c in failed:
        print(f"error: cell: {c.dataset},{c.method},{c.input}: {c.error}", file=sys.stderr)
    return FAIL_EXIT if failed else 0


COMMANDS = {
    "synth": cmd_synth,
    "segment": cmd_segment,
    "fuse": cmd_fuse,
    "eval": cmd_eval,
    "split": cmd_split,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.CRITICAL,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ConfigError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except CropFuseError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return FAIL_EXIT
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL_EXIT


if __name__ == "__main__":
    sys.exit(main())
