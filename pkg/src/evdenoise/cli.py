"""Command-line entry point: ``evdenoise {generate,denoise,frames,metrics,analyze}``.

Exit codes: 0 success, 1 usage, 2 input format error, 3 processing error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import analysis, framer, ingest, metrics, synth
from .baselines import Bs1Filter, Bs2Filter, Bs3Filter, verdicts
from .events import Label, LabeledEvent, SensorGeometry
from .seqx import Aggregation, SeqXConfig, make_seqx

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_PROCESSING = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _weights(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight list {s!r}") from None


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="evdenoise", description="Event-camera denoising toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a labelled synthetic scene")
    g.add_argument("output")
    g.add_argument("--labels", help="label sidecar path")
    g.add_argument("--format", choices=("binary", "text"), default="binary")
    g.add_argument("--width", type=_positive_int, default=128)
    g.add_argument("--height", type=_positive_int, default=128)
    g.add_argument("--duration-us", type=int, default=5_000_000)
    g.add_argument("--signal-rate", type=float, default=20_000.0)
    g.add_argument("--noise-rate", type=float, default=20_000.0)
    g.add_argument("--trajectory", choices=("pendulum", "linear"), default="pendulum")
    g.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"), help="pendulum lowest point")
    g.add_argument("--amplitude", type=float, help="pendulum half-swing, pixels")
    g.add_argument("--period-us", type=float, default=1_000_000.0)
    g.add_argument("--start", type=float, nargs=2, metavar=("X", "Y"), help="linear start point")
    g.add_argument("--velocity", type=float, nargs=2, metavar=("VX", "VY"), help="linear velocity, px/s")
    g.add_argument("--cluster-radius", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--json", action="store_true")

    d = sub.add_parser("denoise", help="filter a stream")
    d.add_argument("input")
    d.add_argument("output")
    d.add_argument("--filter", required=True, choices=("seqx", "bs1", "bs2", "bs3"))
    d.add_argument("--window", type=_positive_int)
    d.add_argument("--sigma", type=float)
    d.add_argument("--agg", choices=[a.value for a in Aggregation])
    d.add_argument("--weights", type=_weights)
    d.add_argument("--scaled", action="store_true", help="integer, division-free seqx path")
    d.add_argument("--update-on-real", action="store_true", help="store only passed events in the window")
    d.add_argument("--dt-us", type=_positive_int, help="baseline time threshold (bs1/bs3 1000, bs2 2000)")
    d.add_argument("--subsample", type=_positive_int, help="bs2 group size (default 2)")
    d.add_argument("--verdicts", help="write per-event verdict sidecar")
    d.add_argument("--in-format", choices=("auto", "binary", "text"), default="auto")
    d.add_argument("--out-format", choices=("binary", "text"), help="default: same as input")
    d.add_argument("--json", action="store_true")

    f = sub.add_parser("frames", help="render fixed-count PGM frames")
    f.add_argument("input")
    f.add_argument("outdir")
    f.add_argument("--count", type=int, help="events per frame (default 1000, x10 above 300k pixels)")
    f.add_argument("--keep-partial", action="store_true")
    f.add_argument("--in-format", choices=("auto", "binary", "text"), default="auto")
    f.add_argument("--json", action="store_true")

    m = sub.add_parser("metrics", help="PSNR/SSIM between two frame directories")
    m.add_argument("reference_dir")
    m.add_argument("test_dir")
    m.add_argument("--out", help="CSV path (default stdout)")
    m.add_argument("--parallel", type=_positive_int, default=1, metavar="N")
    m.add_argument("--json", action="store_true")

    a = sub.add_parser("analyze", help="aggregation-function study on a labelled stream")
    a.add_argument("input")
    a.add_argument("--labels", help="label sidecar; default labels the stream with bs1")
    a.add_argument("--dt-us", type=_positive_int, default=1000, help="bs1 threshold when labelling")
    a.add_argument("--window", type=_positive_int, default=2)
    a.add_argument("--max-events", type=_positive_int, help="study only the first N events")
    a.add_argument("--bins", type=int, default=analysis.DEFAULT_BINS)
    a.add_argument("--range", type=float, nargs=2, default=analysis.DEFAULT_RANGE, metavar=("LO", "HI"))
    a.add_argument("--weights", type=_weights)
    a.add_argument("--tie-tolerance", type=float, default=analysis.DEFAULT_TIE_TOLERANCE)
    a.add_argument("--hist-dir", help="write one histogram CSV per mode here")
    a.add_argument("--in-format", choices=("auto", "binary", "text"), default="auto")
    a.add_argument("--json", action="store_true")
    return p


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")


def _require_dir(path: str) -> None:
    if not os.path.isdir(path):
        raise FileNotFoundError(f"no such directory: {path}")


def _require_parent(path: Optional[str]) -> None:
    if path:
        parent = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(parent):
            raise UsageError(f"output directory does not exist: {parent}")


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, default=str) if args.json else text)


# -- subcommands --------------------------------------------------------------


def cmd_generate(args) -> int:
    _require_parent(args.output)
    _require_parent(args.labels)
    try:
        geom = SensorGeometry(args.width, args.height)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.trajectory == "pendulum":
        if args.start or args.velocity:
            raise UsageError("--start/--velocity apply to --trajectory linear")
        center = tuple(args.center) if args.center else ((geom.width - 1) / 2, 0.7 * (geom.height - 1))
        amp = args.amplitude if args.amplitude is not None else 0.3 * geom.width
        traj = synth.Pendulum(center, amp, args.period_us)
    else:
        if args.center or args.amplitude is not None:
            raise UsageError("--center/--amplitude apply to --trajectory pendulum")
        if not (args.start and args.velocity):
            raise UsageError("--trajectory linear needs --start and --velocity")
        traj = synth.Linear(tuple(args.start), tuple(args.velocity))
    try:
        cfg = synth.SceneConfig(
            geom, args.duration_us, args.signal_rate, args.noise_rate, traj, args.cluster_radius, args.seed
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    labeled = synth.generate(cfg)
    events = [le.event for le in labeled]
    ingest.save_stream(args.output, geom, events, args.format)
    if args.labels:
        ingest.save_labels(args.labels, (le.label for le in labeled))
    n_real = sum(1 for le in labeled if le.label)
    _emit(
        args,
        {"events": len(events), "real": n_real, "noise": len(events) - n_real},
        f"wrote {len(events)} events ({n_real} real, {len(events) - n_real} noise) to {args.output}",
    )
    return EXIT_OK


def _make_filter(args, geom: SensorGeometry):
    seqx_flags = {
        "--window": args.window is not None,
        "--sigma": args.sigma is not None,
        "--agg": args.agg is not None,
        "--weights": args.weights is not None,
        "--scaled": args.scaled,
        "--update-on-real": args.update_on_real,
    }
    if args.filter == "seqx":
        bad = [n for n, v in (("--dt-us", args.dt_us), ("--subsample", args.subsample)) if v is not None]
        if bad:
            raise UsageError(f"{', '.join(bad)} not valid with --filter seqx")
        overrides = {}
        if args.window is not None:
            overrides["window_length"] = args.window
        if args.sigma is not None:
            overrides["sigma"] = args.sigma
        if args.agg is not None:
            overrides["aggregation"] = Aggregation(args.agg)
        if args.weights is not None:
            overrides["weights"] = args.weights
        overrides["update_on_real"] = args.update_on_real
        try:
            cfg = SeqXConfig.default_for(geom, **overrides)
            return make_seqx(geom, cfg, scaled=args.scaled)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    bad = [n for n, v in seqx_flags.items() if v]
    if args.subsample is not None and args.filter != "bs2":
        bad.append("--subsample")
    if bad:
        raise UsageError(f"{', '.join(bad)} not valid with --filter {args.filter}")
    if args.filter == "bs1":
        return Bs1Filter(geom, args.dt_us or 1000)
    if args.filter == "bs2":
        return Bs2Filter(geom, args.dt_us or 2000, args.subsample or 2)
    return Bs3Filter(geom, args.dt_us or 1000)


def cmd_denoise(args) -> int:
    _require_file(args.input)
    _require_parent(args.output)
    _require_parent(args.verdicts)
    in_fmt = ingest.sniff_format(args.input) if args.in_format == "auto" else args.in_format
    geom, events = ingest.load_stream(args.input, in_fmt)
    filt = _make_filter(args, geom)
    v = verdicts(filt, events)
    kept = [e for e, lab in zip(events, v) if lab == Label.REAL]
    ingest.save_stream(args.output, geom, kept, args.out_format or in_fmt)
    if args.verdicts:
        ingest.save_labels(args.verdicts, v)
    n = len(events)
    rate = len(kept) / n if n else 0.0
    summary = {"filter": filt.name, "input": n, "passed": len(kept), "dropped": n - len(kept), "pass_rate": rate}
    _emit(args, summary, f"{filt.name}: {n} in, {len(kept)} passed, {n - len(kept)} dropped ({rate:.2%} pass rate)")
    return EXIT_OK


def cmd_frames(args) -> int:
    if args.count is not None and args.count < 1:
        raise UsageError(f"--count must be >= 1, got {args.count}")
    _require_file(args.input)
    geom, events = ingest.load_stream(args.input, args.in_format)
    count = args.count or framer.default_bundle_sizes(geom)[0]
    frames = framer.accumulate(events, geom, count, keep_partial=args.keep_partial)
    framer.save_frames(frames, args.outdir)
    _emit(
        args,
        {"events": len(events), "count": count, "frames": len(frames)},
        f"wrote {len(frames)} frames of {count} events to {args.outdir}",
    )
    return EXIT_OK


def cmd_metrics(args) -> int:
    _require_dir(args.reference_dir)
    _require_dir(args.test_dir)
    _require_parent(args.out)
    ref = framer.load_frames(args.reference_dir)
    test = framer.load_frames(args.test_dir)
    if len(ref) != len(test):
        raise ValueError(f"frame count mismatch: {args.reference_dir} has {len(ref)}, {args.test_dir} has {len(test)}")
    report = metrics.compare_pipelines(ref, test, workers=args.parallel)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            report.to_csv(f)
    if args.json:
        print(
            json.dumps(
                {
                    "frames": len(report.per_frame),
                    "mean_psnr": report.mean_psnr,
                    "mean_ssim": report.mean_ssim,
                    "identical": report.identical_count,
                }
            )
        )
    elif not args.out:
        report.to_csv(sys.stdout)
    else:
        print(f"{len(report.per_frame)} frame pairs, mean PSNR {report.mean_psnr:.2f} dB, mean SSIM {report.mean_ssim:.4f}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    _require_file(args.input)
    if args.labels:
        _require_file(args.labels)
    geom, events = ingest.load_stream(args.input, args.in_format)
    if args.labels:
        labels = ingest.load_labels(args.labels, len(events))
    else:
        labels = verdicts(Bs1Filter(geom, args.dt_us), events)
    if args.max_events is not None:
        events, labels = events[: args.max_events], labels[: args.max_events]
    labeled = [LabeledEvent(e, lab) for e, lab in zip(events, labels)]
    weights = args.weights
    if weights is None and args.window not in analysis.DEFAULT_WAVG_WEIGHTS:
        weights = (1.0,) * args.window
    hists = analysis.build_histograms(labeled, geom, args.window, bins=args.bins, range=tuple(args.range), weights=weights)
    verdict = analysis.select_function(hists, args.tie_tolerance)
    if args.hist_dir:
        os.makedirs(args.hist_dir, exist_ok=True)
        for mode, h in hists.items():
            with open(os.path.join(args.hist_dir, f"hist_{mode.value}.csv"), "w", encoding="utf-8", newline="\n") as f:
                h.to_csv(f)
    _emit(args, verdict.as_dict(), verdict.report())
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "denoise": cmd_denoise,
    "frames": cmd_frames,
    "metrics": cmd_metrics,
    "analyze": cmd_analyze,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"evdenoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ingest.StreamFormatError, FileNotFoundError) as exc:
        print(f"evdenoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"evdenoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
