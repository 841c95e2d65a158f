"""Command-line interface.

One verb per toolkit capability: validate, stats, split, dedup, anchors,
synth, eval-detect, eval-script, eval-hybrid, diagnose, sweep-resolution,
subsets, serve. Results go to standard output or files; diagnostics go to
standard error. Exit codes: 0 success, 1 usage error, 2 data error.
All randomness is seed-controlled, so identical arguments and inputs give
byte-identical outputs. The UTIV_LOG environment variable sets verbosity
(DEBUG, INFO, WARNING, ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from utiv import anchors as anchor_mod
from utiv import evaluation, experiments
from utiv.dataset import (
    dataset_stats,
    dedup_frames,
    load_dataset,
    split_dataset,
    stats_to_csv,
    validate_dataset,
)
from utiv.detections import parse_detections, perturb_ground_truth, write_detections, PERTURB_MODES
from utiv.errors import UtivError

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="utiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", type=Path, help="output directory (run config is logged here)")
        return p

    p = add("validate", "check a dataset tree for consistency problems")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--strict", action="store_true", help="reject unknown XML elements/attributes")

    p = add("stats", "per-channel video/frame/line counts")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "text"), default="text")

    p = add("split", "reproducible frame-level train/test split")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--fraction", type=float, required=True, help="train fraction in (0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratify", action="store_true", help="apply the fraction per channel")

    p = add("dedup", "list frames to keep after near-duplicate filtering")
    p.add_argument("--frames", type=Path, required=True, help="directory of frame images")
    p.add_argument("--threshold", type=int, default=8, help="max Hamming distance to drop")

    p = add("anchors", "emit the anchor shape set (and optional tiling)")
    p.add_argument("--config", type=Path, help="key = value anchor configuration file")
    p.add_argument("--width", type=int, help="tile over a frame of this width")
    p.add_argument("--height", type=int, help="tile over a frame of this height")

    p = add("synth", "synthesize detections by perturbing the ground truth")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--mode", choices=PERTURB_MODES, required=True)
    p.add_argument("--magnitude", type=float, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hybrid", action="store_true", help="label boxes with their script")
    p.add_argument("--dets-out", type=Path, required=True, help="detection file to write")

    p = add("eval-detect", "area-based precision/recall for script-agnostic detections")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--dets", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "text"), default="text")

    p = add("eval-script", "confusion matrix and per-script scores for classification pairs")
    p.add_argument("--pairs", type=Path, help="file of 'true predicted' lines")
    p.add_argument("--matrix", help="direct counts a,b,c,d for ((a,b),(c,d))")
    p.add_argument("--format", choices=("csv", "text"), default="text")

    p = add("eval-hybrid", "per-script area-based scores for script-aware detections")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--dets", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "text"), default="text")

    p = add("diagnose", "localization diagnostics: matches, misses, size errors")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--dets", type=Path, required=True)
    p.add_argument("--iou", type=float, default=0.5)

    p = add("sweep-resolution", "re-score detections across frame resolutions")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--dets", type=Path, required=True)
    p.add_argument(
        "--resolutions",
        required=True,
        help="comma-separated WxH list, e.g. 256x144,900x600,1920x1080",
    )
    p.add_argument(
        "--no-rescale-detections",
        action="store_true",
        help="evaluate the detections as-is instead of rescaling them with the ground truth",
    )

    p = add("subsets", "nested training subsets by text-line budget")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--counts", required=True, help="ascending comma-separated line budgets")
    p.add_argument("--seed", type=int, default=0)

    p = add("serve", "run the local annotation service")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui", type=Path, help="directory of built frontend files to serve at /")

    return parser


def _log_run_config(args: argparse.Namespace) -> None:
    if not getattr(args, "out", None):
        return
    args.out.mkdir(parents=True, exist_ok=True)
    config = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in sorted(vars(args).items())
    }
    (args.out / "run_config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _print_scores(scores: dict, fmt: str) -> None:
    if fmt == "csv":
        sys.stdout.write(evaluation.scores_to_csv(scores))
    else:
        sys.stdout.write(evaluation.scores_to_text(scores))


def _cmd_validate(args) -> int:
    ds = load_dataset(args.root, strict=args.strict)
    issues = validate_dataset(ds)
    for issue in issues:
        key = f"{issue.key[0]}#{issue.key[1]}" if issue.key else "-"
        print(f"{issue.severity}\t{key}\t{issue.message}")
    errors = sum(1 for issue in issues if issue.severity == "error")
    print(f"checked {len(ds)} frames: {errors} errors, {len(issues) - errors} warnings", file=sys.stderr)
    return DATA_ERROR if errors else 0


def _cmd_stats(args) -> int:
    stats = dataset_stats(load_dataset(args.root))
    if args.format == "csv":
        sys.stdout.write(stats_to_csv(stats))
    else:
        rows = (*stats.channels, stats.total)
        width = max(len(r.channel) for r in rows)
        print(f"{'channel':<{width}}  videos  frames  urdu_lines  english_lines")
        for r in rows:
            print(f"{r.channel:<{width}}  {r.videos:>6}  {r.frames:>6}  {r.urdu_lines:>10}  {r.english_lines:>13}")
    if args.out:
        (args.out / "stats.csv").write_text(stats_to_csv(stats), encoding="utf-8")
    return 0


def _cmd_split(args) -> int:
    ds = load_dataset(args.root)
    split = split_dataset(ds, args.fraction, args.seed, stratify_by_channel=args.stratify)
    print(f"train {len(split.train_frames)} frames, test {len(split.test_frames)} frames", file=sys.stderr)
    if args.out:
        for name, keys in (("train", split.train_frames), ("test", split.test_frames)):
            (args.out / f"{name}.txt").write_text(
                "".join(f"{video} {number}\n" for video, number in keys), encoding="utf-8"
            )
    else:
        for video, number in split.train_frames:
            print(f"train {video} {number}")
        for video, number in split.test_frames:
            print(f"test {video} {number}")
    return 0


def _cmd_dedup(args) -> int:
    kept = dedup_frames(args.frames, args.threshold)
    for path in kept:
        print(path)
    print(f"kept {len(kept)} frames", file=sys.stderr)
    return 0


def _cmd_anchors(args) -> int:
    config = anchor_mod.load_anchor_config(args.config) if args.config else anchor_mod.AnchorConfig()
    shapes = anchor_mod.generate_anchor_shapes(config)
    print("width,height,scale,aspect_ratio")
    for s in shapes:
        print(f"{s.width:.1f},{s.height:.1f},{s.scale:g},{s.aspect_ratio:g}")
    if args.width and args.height:
        tiled = anchor_mod.tile_anchors(shapes, args.width, args.height, config)
        print(f"tiled {len(tiled)} anchors over {args.width}x{args.height}", file=sys.stderr)
        if args.out:
            (args.out / "anchors.csv").write_text(
                "x,y,width,height\n"
                + "".join(f"{r.x},{r.y},{r.width},{r.height}\n" for r in tiled),
                encoding="utf-8",
            )
    return 0


def _cmd_synth(args) -> int:
    ds = load_dataset(args.root)
    dets = perturb_ground_truth(ds, args.mode, magnitude=args.magnitude, seed=args.seed, hybrid=args.hybrid)
    write_detections(dets, args.dets_out)
    print(f"wrote {dets.total()} detections to {args.dets_out}", file=sys.stderr)
    return 0


def _cmd_eval_detect(args) -> int:
    ds = load_dataset(args.root)
    dets = parse_detections(args.dets)
    score = evaluation.evaluate_detection(dets, ds)
    _print_scores({"detection": score}, args.format)
    if args.out:
        experiments.emit_report({"detection": score}, args.out)
    return 0


def _cmd_eval_script(args) -> int:
    if bool(args.pairs) == bool(args.matrix):
        raise UsageError("eval-script needs exactly one of --pairs or --matrix")
    if args.pairs:
        pairs = []
        for lineno, raw in enumerate(args.pairs.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise UtivError(f"{args.pairs}:{lineno}: expected 'true predicted', got {raw!r}")
            pairs.append((parts[0], parts[1]))
        matrix = evaluation.confusion_matrix(pairs)
    else:
        try:
            a, b, c, d = (int(part) for part in args.matrix.split(","))
        except ValueError:
            raise UsageError(f"--matrix wants four comma-separated integers, got {args.matrix!r}") from None
        matrix = evaluation.ConfusionMatrix(counts=((a, b), (c, d)))
    print("confusion matrix (rows = true, columns = predicted):")
    print(f"{'':>10} {'urdu':>8} {'english':>8}")
    for label, row in zip(matrix.labels, matrix.counts):
        print(f"{label:>10} {row[0]:>8} {row[1]:>8}")
    print(f"accuracy {matrix.accuracy:.4f}")
    _print_scores(evaluation.class_prf(matrix), args.format)
    return 0


def _cmd_eval_hybrid(args) -> int:
    ds = load_dataset(args.root)
    dets = parse_detections(args.dets)
    scores = evaluation.evaluate_hybrid(dets, ds)
    _print_scores(scores, args.format)
    if args.out:
        experiments.emit_report({"hybrid": scores}, args.out)
    return 0


def _cmd_diagnose(args) -> int:
    ds = load_dataset(args.root)
    dets = parse_detections(args.dets)
    report = evaluation.localization_diagnostics(dets, ds, iou_match=args.iou)
    print(f"matches      {report.matches}")
    print(f"misses       {report.misses}")
    print(f"false_alarms {report.false_alarms}")
    print(f"oversize     {report.oversize}")
    print(f"undersize    {report.undersize}")
    print(f"mean detected/gt area ratio {report.mean_area_ratio:.4f}")
    bins = " ".join(str(count) for count in report.iou_histogram)
    print(f"iou histogram [0.0..1.0): {bins}")
    return 0


def _parse_resolutions(raw: str) -> list[tuple[int, int]]:
    resolutions = []
    for part in raw.split(","):
        try:
            width, height = part.lower().split("x")
            resolutions.append((int(width), int(height)))
        except ValueError:
            raise UsageError(f"bad resolution {part!r}, expected WxH") from None
    return resolutions


def _cmd_sweep_resolution(args) -> int:
    ds = load_dataset(args.root)
    dets = parse_detections(args.dets)
    points = experiments.resolution_sweep(
        ds,
        dets,
        _parse_resolutions(args.resolutions),
        rescale_detections=not args.no_rescale_detections,
    )
    sys.stdout.write(experiments.sweep_to_csv(points))
    if args.out:
        (args.out / "sweep.csv").write_text(experiments.sweep_to_csv(points), encoding="utf-8")
    return 0


def _cmd_subsets(args) -> int:
    ds = load_dataset(args.root)
    try:
        counts = [int(part) for part in args.counts.split(",")]
    except ValueError:
        raise UsageError(f"bad --counts {args.counts!r}") from None
    subsets = experiments.training_subsets(ds, counts, seed=args.seed)
    for budget, subset in zip(counts, subsets):
        print(f"subset {budget}: {len(subset)} frames", file=sys.stderr)
        if args.out:
            (args.out / f"subset_{budget}.txt").write_text(
                "".join(f"{video} {number}\n" for video, number in subset), encoding="utf-8"
            )
        else:
            for video, number in subset:
                print(f"{budget} {video} {number}")
    return 0


def _cmd_serve(args) -> int:
    from utiv.service import serve

    serve(args.root, host=args.host, port=args.port, ui_dir=args.ui)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "split": _cmd_split,
    "dedup": _cmd_dedup,
    "anchors": _cmd_anchors,
    "synth": _cmd_synth,
    "eval-detect": _cmd_eval_detect,
    "eval-script": _cmd_eval_script,
    "eval-hybrid": _cmd_eval_hybrid,
    "diagnose": _cmd_diagnose,
    "sweep-resolution": _cmd_sweep_resolution,
    "subsets": _cmd_subsets,
    "serve": _cmd_serve,
}


def run(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("UTIV_LOG", "WARNING").upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _log_run_config(args)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except UtivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
