"""Command line entry point: ``streetlayers {label,check,synth,eval,bench}``.

Exit codes: 0 success, 1 usage, 2 I/O or parse failure, 3 verification
failure.
"""
import argparse
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import io as lio
from .core import ConfigError, format_config, load_config, render_maps
from .estimator import DemoQualityWarning, label_scene
from .infer import infer_scene
from .metrics import evaluate
from .oracle import brute_force_scene, random_instance

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("streetlayers")


class CliError(Exception):
    def __init__(self, message, code=EXIT_IO):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(fn, path, what):
    try:
        return fn(path)
    except FileNotFoundError:
        raise CliError(f"{what}: no such file: {path}") from None
    except (OSError, ValueError) as e:
        raise CliError(f"{what}: cannot read {path}: {e}") from None


def _write(fn, path, *args):
    try:
        fn(path, *args)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}") from None


def cmd_label(args):
    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        raise CliError(f"config: no such file: {args.config}") from None
    except (OSError, ConfigError) as e:
        raise CliError(f"config {args.config}: {e}") from None

    left = right = None
    if args.left or args.right:
        if not (args.left and args.right):
            raise CliError("--left and --right must be given together", EXIT_USAGE)
        left = _read(lio.read_gray, args.left, "left image")
        right = _read(lio.read_gray, args.right, "right image")
    volume = _read(lio.read_llt1, args.cost, "cost volume") if args.cost else None
    if left is None and volume is None:
        raise CliError("need --left/--right or --cost", EXIT_USAGE)
    scores = _read(lio.read_llt1, args.scores, "scores") if args.scores else None
    if scores is None:
        print("warning: no --scores given, using the heuristic scorer; "
              "labels are demo quality only", file=sys.stderr)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DemoQualityWarning)
            sl = label_scene(cfg, left, right, scores=scores, cost_volume=volume,
                             n_jobs=args.threads)
    except ValueError as e:
        raise CliError(f"labeling failed: {e}") from None

    labels, disp = render_maps(sl)
    _write(lio.write_label_map, args.out_labels, labels)
    _write(lio.write_disparity, args.out_disp, disp, cfg.disparities)
    log.info("labeled %dx%d image, total energy %.6g", sl.width, sl.height, sl.total_energy)
    return EXIT_OK


def _instance_dump(appearance, volume, model):
    return json.dumps({
        "horizon_row": model.horizon_row,
        "ground_slope": model.slope,
        "disparities": model.max_disparity,
        "appearance": appearance.tolist(),
        "volume": volume.tolist(),
    })


def cmd_check(args):
    rng = np.random.default_rng(args.seed)
    for trial in range(args.trials):
        app, vol, model = random_instance(rng, args.max_w, args.max_h, args.max_d)
        sl = infer_scene(app, vol, model, n_jobs=args.threads)
        ref, ref_e = brute_force_scene(app, vol, model)
        for i, (a, e, b, f) in enumerate(zip(sl.columns, sl.energies, ref, ref_e)):
            if a != b or e != f:
                print(f"MISMATCH trial {trial} column {i}: dp {a} energy {e!r}, "
                      f"oracle {b} energy {f!r}")
                print(_instance_dump(app, vol, model))
                return EXIT_VERIFY
    print(f"ok: {args.trials} trials, dp matches oracle")
    return EXIT_OK


SYNTH_FILES = {
    "labels": "gt_labels.ppm",
    "disparity": "gt_disp.pgm",
    "scores": "scores.llt1",
    "cost": "cost.llt1",
    "config": "config.txt",
}


def cmd_synth(args):
    from .synth import generate

    try:
        scene = generate(args.w, args.h, args.d, args.noise_app, args.noise_depth, args.seed)
    except ValueError as e:
        raise CliError(str(e), EXIT_USAGE) from None
    out = args.out_dir
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as e:
        raise CliError(f"cannot create {out}: {e}") from None
    p = {k: os.path.join(out, v) for k, v in SYNTH_FILES.items()}
    _write(lio.write_label_map, p["labels"], scene.labels)
    _write(lio.write_disparity, p["disparity"], scene.disparity, args.d)
    _write(lio.write_llt1, p["scores"], scene.scores)
    _write(lio.write_llt1, p["cost"], scene.volume)
    _write(lio.atomic_write, p["config"], format_config(scene.config).encode("ascii"))
    for path in p.values():
        print(path)
    return EXIT_OK


def cmd_eval(args):
    pred, pred_ign = _read(lio.read_label_map, args.pred, "prediction")
    gt, gt_ign = _read(lio.read_label_map, args.gt, "ground truth")
    if pred.shape != gt.shape:
        raise CliError(f"prediction {pred.shape} and ground truth {gt.shape} differ in size")
    if pred_ign.any():
        raise CliError(f"{args.pred}: prediction contains unlabeled (black) pixels")
    ignore = gt_ign
    if args.ignore:
        mask, _ = _read(lio.read_pgm, args.ignore, "ignore mask")
        if mask.shape != gt.shape:
            raise CliError(f"ignore mask {mask.shape} and ground truth {gt.shape} differ in size")
        ignore = ignore | (mask != 0)
    report = evaluate(pred, gt, ignore)
    if args.format in ("table", "both"):
        print(report.format_table())
    if args.format in ("kv", "both"):
        print(report.format_kv())
    return EXIT_OK


def cmd_bench(args):
    from .bench import format_bench, run_bench

    try:
        heights = [int(h) for h in args.heights.split(",") if h.strip()]
    except ValueError:
        raise CliError(f"--heights: expected comma separated integers, got {args.heights!r}",
                       EXIT_USAGE) from None
    if len(heights) < 2:
        raise CliError("--heights needs at least two values", EXIT_USAGE)
    rows, exponent = run_bench(heights, args.d, args.w, args.repeats, n_jobs=args.threads)
    print(format_bench(rows, exponent, args.w, args.d))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="streetlayers", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def threads(sp):
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads for column blocks (default: CPU count)")

    s = sub.add_parser("label", help="label a stereo pair")
    s.add_argument("--left", help="left image, binary PGM")
    s.add_argument("--right", help="right image, binary PGM")
    s.add_argument("--scores", help="class scores, LLT1 with 5 channels")
    s.add_argument("--cost", help="precomputed cost volume, LLT1 (skips stereo matching)")
    s.add_argument("--config", required=True)
    s.add_argument("--out-labels", required=True, help="label map, binary PPM")
    s.add_argument("--out-disp", required=True, help="disparity map, 16-bit PGM scaled by 256/D")
    threads(s)
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("check", help="compare the DP with the brute-force oracle")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--max-w", type=int, default=4)
    s.add_argument("--max-h", type=int, default=16)
    s.add_argument("--max-d", type=int, default=8)
    threads(s)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("synth", help="write a synthetic scene")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--w", type=int, default=64)
    s.add_argument("--h", type=int, default=48)
    s.add_argument("--d", type=int, default=16)
    s.add_argument("--noise-app", type=float, default=0.0)
    s.add_argument("--noise-depth", type=float, default=0.0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("eval", help="IoU of a label map against ground truth")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--ignore", help="PGM mask, nonzero pixels are ignored")
    s.add_argument("--format", choices=("table", "kv", "both"), default="both")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("bench", help="stage timings across image heights")
    s.add_argument("--heights", default="45,90,180,360")
    s.add_argument("--d", type=int, default=64)
    s.add_argument("--w", type=int, default=488)
    s.add_argument("--repeats", type=int, default=3)
    threads(s)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
