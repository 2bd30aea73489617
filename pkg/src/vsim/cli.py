"""Command-line entry point: vsim simulate | batch | bench | serve | profiles.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 profile validation
error, 5 batch completed with per-file failures. Timing reports are
printed as one JSON object per line on standard error; stdout carries
only human-readable status (images and CSVs go to user-named paths).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import statistics
import sys

import numpy as np

from .imageio import ImageDecodeError, read_image, write_image
from .pipeline import DEFAULT_BUDGET_US, process_frame
from .profile import (PRESET_DESCRIPTIONS, ProfileParseError,
                      ProfileValidationError, preset, profile_to_dict,
                      save_profile, with_param)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PROFILE = 4
EXIT_PARTIAL = 5

_IMAGE_EXTS = (".png", ".jpg", ".jpeg")


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _colored(text: str, code: str, stream) -> str:
    if _use_color(stream):
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _default_budget() -> int:
    env = os.environ.get("VSIM_BUDGET_US")
    if env is None:
        return DEFAULT_BUDGET_US
    try:
        value = int(env)
    except ValueError:
        value = 0
    if value <= 0:
        raise ValueError(
            f"VSIM_BUDGET_US must be a positive integer, got {env!r}")
    return value


def _parse_fixation(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"fixation must be 'x,y' with x,y in [0,1], got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"fixation must be 'x,y' with numeric x,y, got {text!r}")


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        w, h = int(parts[0]), int(parts[1])
        if len(parts) != 2 or w < 1 or h < 1:
            raise ValueError
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(
            f"size must be WxH (e.g. 1280x720), got {text!r}")
    return w, h


def _resolve_profile(args):
    """Build the effective profile from --profile/--stage plus overrides."""
    if getattr(args, "profile", None):
        try:
            with open(args.profile, "rb") as fh:
                prof = _load_profile_bytes(fh.read())
        except OSError as exc:
            raise _IoError(f"cannot read profile {args.profile}: {exc}")
    else:
        prof = preset(args.stage if args.stage is not None else 0)
    if getattr(args, "fixation", None) is not None:
        prof = with_param(prof, "field.fixation", args.fixation)
    if getattr(args, "fov", None) is not None:
        prof = with_param(prof, "field.fov_h", args.fov)
    if getattr(args, "seed", None) is not None:
        prof = with_param(prof, "floaters.seed", args.seed)
        prof = with_param(prof, "patches.seed", args.seed)
    return prof


def _load_profile_bytes(data: bytes):
    from .profile import load_profile

    return load_profile(data)


class _IoError(Exception):
    pass


def _cmd_simulate(args) -> int:
    prof = _resolve_profile(args)
    frame = read_image(args.input)
    out, report = process_frame(frame, prof, t=args.time,
                                budget_us=_default_budget())
    write_image(args.output, out)
    print(json.dumps(report.to_dict()), file=sys.stderr)
    return EXIT_OK


def _cmd_batch(args) -> int:
    prof = _resolve_profile(args)
    budget = _default_budget()
    if not os.path.isdir(args.input_dir):
        raise _IoError(f"input directory does not exist: {args.input_dir}")
    os.makedirs(args.output_dir, exist_ok=True)
    rels = sorted(
        os.path.relpath(os.path.join(root, name), args.input_dir)
        for root, _, names in os.walk(args.input_dir)
        for name in names if name.lower().endswith(_IMAGE_EXTS))

    def run_one(rel):
        src = os.path.join(args.input_dir, rel)
        dst = os.path.join(args.output_dir, rel)
        frame = read_image(src)
        out, report = process_frame(frame, prof, t=args.time,
                                    budget_us=budget)
        os.makedirs(os.path.dirname(dst) or ".", exist_ok=True)
        write_image(dst, out)
        return report

    rows = []
    failures = 0
    jobs = args.jobs or os.cpu_count() or 1
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {rel: pool.submit(run_one, rel) for rel in rels}
        for rel in rels:
            try:
                report = futures[rel].result()
            except (OSError, ImageDecodeError, ValueError) as exc:
                failures += 1
                print(f"vsim: batch: {rel}: {exc}", file=sys.stderr)
            else:
                rows.append((rel, report.width, report.height,
                             report.total_us, report.over_budget))
    csv_path = os.path.join(args.output_dir, "timing.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "width", "height", "total_us", "over_budget"])
        writer.writerows(rows)
    if failures:
        print(f"vsim: batch: {failures} of {len(rels)} files failed",
              file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_bench(args) -> int:
    width, height = args.size
    budget = args.budget if args.budget is not None else _default_budget()
    stages = range(5) if args.stage == "all" else [int(args.stage)]
    rng = np.random.default_rng(0)
    frame = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    for stage in stages:
        prof = preset(stage)
        for _ in range(10):
            process_frame(frame, prof, t=0.0, budget_us=budget)
        samples = []
        filter_samples: dict[str, list[int]] = {}
        for _ in range(args.frames):
            _, report = process_frame(frame, prof, t=0.0, budget_us=budget)
            samples.append(report.total_us)
            for name, us in report.filters:
                filter_samples.setdefault(name, []).append(us)
        median = int(statistics.median(samples))
        p95 = int(np.percentile(samples, 95))
        doc = {
            "stage": stage,
            "width": width,
            "height": height,
            "frames": args.frames,
            "samples_us": samples,
            "median_us": median,
            "p95_us": p95,
            "budget_us": budget,
            "within_budget": median <= budget,
            "filters": {
                name: {"median_us": int(statistics.median(vals)),
                       "p95_us": int(np.percentile(vals, 95))}
                for name, vals in filter_samples.items()
            },
        }
        print(json.dumps(doc), file=sys.stderr)
        verdict = "ok" if median <= budget else "OVER BUDGET"
        code = "32" if median <= budget else "31"
        print(f"stage {stage}: median {median} us, p95 {p95} us "
              f"(budget {budget} us) "
              + _colored(verdict, code, sys.stdout))
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(budget_us=_default_budget(),
                           max_frame_bytes=args.max_frame_bytes)
    try:
        serve(host=args.host, port=args.port, config=config)
    except OSError as exc:
        raise _IoError(str(exc))
    return EXIT_OK


def _cmd_profiles(args) -> int:
    if args.action == "list":
        for stage in range(5):
            name = _colored(preset(stage).name, "36", sys.stdout)
            print(f"{stage}  {name}  {PRESET_DESCRIPTIONS[stage]}")
        return EXIT_OK
    if args.action == "show":
        print(json.dumps(profile_to_dict(preset(args.number)), indent=2))
        return EXIT_OK
    # export
    try:
        with open(args.path, "wb") as fh:
            fh.write(save_profile(preset(args.number)))
    except OSError as exc:
        raise _IoError(f"cannot write {args.path}: {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vsim",
        description="Real-time diabetic-retinopathy vision simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_profile_flags(p, with_seed=True):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--stage", type=int, choices=range(5),
                           help="preset stage (0..4)")
        group.add_argument("--profile", help="profile file (.vsim.json)")
        p.add_argument("--fixation", type=_parse_fixation, metavar="X,Y",
                       help="normalized fixation point, e.g. 0.5,0.5")
        p.add_argument("--fov", type=float, help="horizontal FOV, degrees")
        if with_seed:
            p.add_argument("--seed", type=int,
                           help="override floater and patch seeds")
        p.add_argument("--time", type=float, default=0.0,
                       help="simulation time in seconds (default 0)")

    p_sim = sub.add_parser("simulate", help="simulate one image")
    p_sim.add_argument("--input", required=True, help="input PNG/JPEG")
    p_sim.add_argument("--output", required=True, help="output image path")
    add_profile_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_batch = sub.add_parser("batch", help="simulate a directory of images")
    p_batch.add_argument("--input-dir", required=True)
    p_batch.add_argument("--output-dir", required=True)
    p_batch.add_argument("--jobs", type=int, default=None,
                         help="parallel workers (default: logical cores)")
    add_profile_flags(p_batch)
    p_batch.set_defaults(func=_cmd_batch)

    p_bench = sub.add_parser("bench", help="benchmark the pipeline")
    p_bench.add_argument("--size", type=_parse_size, default=(1280, 720),
                         metavar="WxH", help="frame size (default 1280x720)")
    p_bench.add_argument("--frames", type=int, default=100,
                         help="timed frames per stage (default 100)")
    p_bench.add_argument("--stage", default="all",
                         choices=["all", "0", "1", "2", "3", "4"])
    p_bench.add_argument("--budget", type=int, default=None,
                         help=f"budget in us (default {DEFAULT_BUDGET_US})")
    p_bench.set_defaults(func=_cmd_bench)

    p_serve = sub.add_parser("serve", help="run the streaming service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--max-frame-bytes", type=int, default=4 * 2 ** 20)
    p_serve.set_defaults(func=_cmd_serve)

    p_prof = sub.add_parser("profiles", help="list/show/export stage presets")
    prof_sub = p_prof.add_subparsers(dest="action", required=True)
    prof_sub.add_parser("list")
    p_show = prof_sub.add_parser("show")
    p_show.add_argument("number", type=int, choices=range(5))
    p_export = prof_sub.add_parser("export")
    p_export.add_argument("number", type=int, choices=range(5))
    p_export.add_argument("path")
    p_prof.set_defaults(func=_cmd_profiles)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "frames", None) is not None and args.command == "bench" \
            and args.frames < 1:
        parser.error("--frames must be >= 1")
    try:
        return args.func(args)
    except (ProfileParseError, ProfileValidationError) as exc:
        print(f"vsim: profile error: {exc}", file=sys.stderr)
        return EXIT_PROFILE
    except _IoError as exc:
        print(f"vsim: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, ImageDecodeError) as exc:
        print(f"vsim: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"vsim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
