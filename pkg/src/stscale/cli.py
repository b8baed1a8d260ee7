"""Command-line front end.

Subcommands: ``estimate-stats``, ``predict``, ``optimize``, ``sweep``.
Exit codes: 0 success, 2 invalid input, 3 file I/O, 4 numerical failure.
Errors are printed to stderr as a single JSON line.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .config import build_model_params, parse_override, read_json, split_config
from .exceptions import StscaleError, ValidationError, VideoIOError
from .stats import VideoStats, estimate_video_stats
from .system import SWEEP_COLUMNS, candidate_grid, optimize, predict, sweep
from .units import ScalingChoice, parse_bitrate
from .video import load_raw_video


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text):
    vals = _float_list(text)
    if any(not v.is_integer() for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def parse_bitrates(text):
    """``'100k,1M'`` or a log-spaced range ``'lo:hi:n'``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"bit-rate range must be lo:hi:n, got {text!r}")
        lo, hi = parse_bitrate(parts[0]), parse_bitrate(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise ValidationError(f"bad point count in {text!r}") from None
        if n < 1 or hi < lo:
            raise ValidationError(f"bit-rate range {text!r} must be ascending with n >= 1")
        if n == 1:
            return [lo]
        return [float(v) for v in np.logspace(np.log10(lo), np.log10(hi), n)]
    rates = [parse_bitrate(v) for v in text.split(",") if v.strip()]
    if not rates:
        raise ValidationError("no bit-rates given")
    return rates


def _add_global(p, suppress):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="JSON", default=default,
                   help="JSON file with model parameters")
    p.add_argument("--out", metavar="PATH", default=default,
                   help="write output here instead of stdout")


def _add_model(p):
    p.add_argument("stats", help="VideoStats JSON (as written by estimate-stats)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one model parameter (repeatable)")
    p.add_argument("--gamma-skip", type=float, help="skip-mode penalty")
    p.add_argument("--k-quant", type=float, help="quantizer constant K")
    p.add_argument("--noise-mode", choices=("gaussian", "empirical"),
                   help="compression-noise estimator")
    p.add_argument("--fixed-point", action="store_true", default=None,
                   help="close the compression-noise loop by iteration")


def _add_candidates(p):
    p.add_argument("--spatial", type=_float_list, help="spatial factors, e.g. 1,2,3")
    p.add_argument("--temporal", type=_int_list, help="temporal factors, e.g. 1,2,3")
    p.add_argument("--independent", action="store_true", default=None,
                   help="let d_m and d_n vary independently")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stscale",
        description="Predict distortion of spatio-temporally down-scaled video coding "
                    "and pick the best down-scaling factors.")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-stats", help="measure VideoStats from a raw luma file")
    _add_global(p, suppress=True)
    p.add_argument("video", help="raw 8-bit planar luma file")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--fps", type=float, required=True)
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--search-range", type=int, default=16)
    p.add_argument("--block", type=int, default=16)

    p = sub.add_parser("predict", help="model one operating point")
    _add_global(p, suppress=True)
    _add_model(p)
    p.add_argument("--bitrate", required=True, help="bits/s, e.g. 180k or 1.25M")
    p.add_argument("--dm", type=float)
    p.add_argument("--dn", type=float)
    p.add_argument("--dt", type=int)

    p = sub.add_parser("optimize", help="best down-scaling factors for a bit-rate")
    _add_global(p, suppress=True)
    _add_model(p)
    p.add_argument("--bitrate", required=True)
    _add_candidates(p)

    p = sub.add_parser("sweep", help="rate-distortion table over bit-rates and candidates")
    _add_global(p, suppress=True)
    _add_model(p)
    p.add_argument("--bitrates", required=True, help="list (100k,1M) or log range lo:hi:n")
    _add_candidates(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (output is identical)")
    return parser


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _model_setup(args):
    file_cfg = read_json(args.config) if args.config else {}
    model, sections = split_config(file_cfg)
    over = dict(parse_override(o) for o in args.overrides)
    for key, attr in (("gamma_skip", "gamma_skip"), ("k_quant", "k_quant"),
                      ("compression_noise_mode", "noise_mode"), ("fixed_point", "fixed_point")):
        if getattr(args, attr) is not None:
            over[key] = getattr(args, attr)
    params = build_model_params(model, over)
    stats = VideoStats.from_dict(read_json(args.stats, "stats"))
    return stats, params, sections


def _candidates(args, sections):
    sec = dict(sections.get("candidates", {}))
    spatial = args.spatial if args.spatial is not None else sec.get("spatial", [1, 2, 3])
    temporal = args.temporal if args.temporal is not None else sec.get("temporal", [1, 2, 3])
    square = not args.independent if args.independent is not None else sec.get("square", True)
    return {"spatial": [float(s) for s in spatial], "temporal": [int(t) for t in temporal],
            "square": bool(square)}


def cmd_estimate_stats(args):
    video = load_raw_video(args.video, args.width, args.height, args.fps)
    file_cfg = read_json(args.config) if args.config else {}
    model, _ = split_config(file_cfg)
    params = build_model_params(model, {})
    stats, diag = estimate_video_stats(
        video, block=args.block, search_range=args.search_range, pairs=args.pairs,
        sigma_dx2=params.sigma_dx2, sigma_dy2=params.sigma_dy2, L=params.L)
    doc = stats.to_dict()
    doc["diagnostics"] = diag
    doc["config"] = {"block": args.block, "search_range": args.search_range,
                     "pairs": args.pairs, "sigma_dx2": params.sigma_dx2,
                     "sigma_dy2": params.sigma_dy2, "L": params.L}
    return _dumps(doc)


def cmd_predict(args):
    stats, params, sections = _model_setup(args)
    sc = dict(sections.get("scaling", {}))
    if args.dm is not None:
        sc["d_m"] = args.dm
        sc.setdefault("d_n", args.dm)
    if args.dn is not None:
        sc["d_n"] = args.dn
    if args.dt is not None:
        sc["d_t"] = args.dt
    choice = ScalingChoice.from_dict(sc)
    rate = parse_bitrate(args.bitrate)
    pred = predict(stats, choice, rate, params)
    return _dumps({"config": {"model": params.to_dict(), "scaling": choice.to_dict(),
                              "bitrate_bps": rate, "stats": stats.to_dict()},
                   "prediction": pred.to_dict()})


def cmd_optimize(args):
    stats, params, sections = _model_setup(args)
    cand = _candidates(args, sections)
    rate = parse_bitrate(args.bitrate)
    res = optimize(stats, rate, candidate_grid(**cand), params)
    doc = res.to_dict()
    doc["config"] = {"model": params.to_dict(), "candidates": cand, "bitrate_bps": rate,
                     "stats": stats.to_dict()}
    return _dumps(doc)


def _csv_value(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def cmd_sweep(args):
    stats, params, sections = _model_setup(args)
    cand = _candidates(args, sections)
    rates = parse_bitrates(args.bitrates)
    if args.jobs == 0:
        raise ValidationError("--jobs must be nonzero")
    rows = sweep(stats, rates, candidate_grid(**cand), params, n_jobs=args.jobs)
    buf = io.StringIO()
    config = {"model": params.to_dict(), "candidates": cand, "stats": stats.to_dict()}
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_csv_value(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


COMMANDS = {"estimate-stats": cmd_estimate_stats, "predict": cmd_predict,
            "optimize": cmd_optimize, "sweep": cmd_sweep}


def _error_line(exc, code):
    return json.dumps({"error": type(exc).__name__, "stage": getattr(exc, "stage", None),
                       "message": str(exc), "exit_code": code}, sort_keys=True)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
        if args.out:
            try:
                with open(args.out, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise VideoIOError(f"cannot write {args.out}: {exc}") from None
        else:
            sys.stdout.write(text)
    except StscaleError as exc:
        print(_error_line(exc, exc.exit_code), file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
