"""Command-line entry point: ``bellscan {analyze,scan,scan2d,hist,synth}``.

All times are integer picoseconds (1 ns = 1000 ps). Exit status is 0 on
success and 2 on bad flags or unreadable/invalid data.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

from . import io as bio
from .model import NOSIG_LABELS, HeraldFilter
from .scan import (
    DEFAULT_OFFSET_MAX_PS,
    DEFAULT_OFFSET_MIN_PS,
    DEFAULT_OFFSET_STEP_PS,
    analyze,
    inclusive_range,
    pvalue_histogram,
    scan_1d,
    scan_2d,
)
from .synth import SynthConfig, generate, load_config

EXIT_OK = 0
EXIT_ERROR = 2


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


@contextmanager
def _binary_out(path):
    if path in (None, "-"):
        yield sys.stdout.buffer
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            yield fh


def _read_input(path):
    if path == "-":
        return bio.read_events(sys.stdin.buffer)
    with open(path, "rb") as fh:
        return bio.read_events(fh)


def _add_window(p):
    p.add_argument("--window-start", type=int, default=0,
                   help="nominal window start in ps (the origin of offsets)")
    p.add_argument("--window-stop", type=int, default=50_000, help="window end in ps")


def _add_offsets(p):
    p.add_argument("--offset-min", type=int, default=DEFAULT_OFFSET_MIN_PS, help="first offset, ps")
    p.add_argument("--offset-max", type=int, default=DEFAULT_OFFSET_MAX_PS, help="last offset (inclusive), ps")
    p.add_argument("--step", type=int, default=DEFAULT_OFFSET_STEP_PS, help="offset step, ps")


def _fmt(v, spec=".4g"):
    return "undefined" if v is None else format(v, spec)


def _text_report(result) -> str:
    lines = [
        f"offset_ps   {result.start_offset_ps}",
        f"threshold   {result.invalid_threshold}",
        f"N           {result.sample_size}",
    ]
    if result.chsh is None:
        lines.append("CHSH        undefined (empty setting pair)")
    else:
        c = result.chsh
        lines.append(f"CHSH        S = {c.value:.4f} +/- {c.sigma:.4f}  "
                     f"p_gauss = {_fmt(result.p_chsh_gaussian)}  "
                     f"p_binom = {_fmt(result.p_chsh_binomial)}")
    if result.nosig is None:
        lines.append("no-signal   undefined (empty setting pair)")
    else:
        for label, s in zip(NOSIG_LABELS, result.nosig):
            flag = "  [degenerate sigma]" if s.degenerate else ""
            lines.append(f"{label:<11} S = {s.value:+.4f} +/- {s.sigma:.4f}  "
                         f"z = {s.z:.3f}  p = {s.p:.4g}{flag}")
    lines.append(f"chi2        {_fmt(result.chi2)} (4 dof)  p = {_fmt(result.p_chi2)}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    events = _read_input(args.input)
    filt = HeraldFilter(args.window_start, args.offset, args.window_stop, args.threshold)
    result = analyze(events, filt)
    if args.format == "json":
        sys.stdout.write(bio.format_scan_json(result))
    elif args.format == "csv":
        sys.stdout.write(bio.format_scan_csv([result]).decode("ascii"))
    else:
        sys.stdout.write(_text_report(result))
    return EXIT_OK


def cmd_scan(args) -> int:
    events = _read_input(args.input)
    base = HeraldFilter(args.window_start, 0, args.window_stop, args.threshold)
    grid = scan_1d(events, base, args.offset_min, args.offset_max, args.step, workers=args.jobs)
    with _binary_out(args.output) as out:
        bio.write_scan_csv(grid.results, out)
    return EXIT_OK


def cmd_scan2d(args) -> int:
    events = _read_input(args.input)
    base = HeraldFilter(args.window_start, 0, args.window_stop, 250)
    offsets = inclusive_range(args.offset_min, args.offset_max, args.step)
    thresholds = inclusive_range(args.threshold_min, args.threshold_max, args.threshold_step)
    grid = scan_2d(events, base, offsets, thresholds, workers=args.jobs)
    with _binary_out(args.output) as out:
        bio.write_scan_csv(grid.results, out)
    return EXIT_OK


def cmd_hist(args) -> int:
    if args.scan == "-":
        results = bio.read_scan_csv(sys.stdin.buffer)
    else:
        results = bio.read_scan_csv(Path(args.scan).read_bytes())
    hist = pvalue_histogram(results, "nosig_chi2" if args.which == "nosig" else "chsh")
    with _binary_out(args.output) as out:
        bio.write_histogram_csv(hist, out)
    return EXIT_OK


_SYNTH_FLAGS = (
    ("--n", "n_attempts", int, "number of heralding candidates"),
    ("--seed", "seed", int, "64-bit RNG seed"),
    ("--visibility", "visibility", float, "correlation strength V of entangled trials"),
    ("--wref", "w_ref", float, "fraction of reflection-contaminated candidates"),
    ("--epsilon", "epsilon", float, "A->B signalling strength in contaminated trials"),
    ("--tau-nv", "tau_nv", float, "NV emission decay constant, ps"),
    ("--tau-ref", "tau_ref", float, "reflection decay constant, ps"),
    ("--lead", "lead", float, "reflection onset relative to t=0, ps"),
    ("--invalid-rate", "invalid_rate", float, "per-attempt invalid-marker probability"),
)


def cmd_synth(args) -> int:
    config = load_config(args.config) if args.config else SynthConfig()
    overrides = {field: getattr(args, field) for _, field, _, _ in _SYNTH_FLAGS
                 if hasattr(args, field)}
    config = config.with_(**overrides)
    events = generate(config)
    with _binary_out(args.out) as out:
        bio.write_events(events, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellscan",
        description="CHSH and no-signalling analysis of heralded Bell-test event files.",
        formatter_class=_Formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse one event-ready sample", formatter_class=_Formatter)
    p.add_argument("--input", required=True, help="event file ('-' for stdin)")
    p.add_argument("--offset", type=int, default=0, help="window-start offset, ps")
    p.add_argument("--threshold", type=int, default=250, help="minimum clean attempts")
    _add_window(p)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="scan the window-start offset at one threshold",
                       formatter_class=_Formatter)
    p.add_argument("--input", required=True)
    _add_offsets(p)
    p.add_argument("--threshold", type=int, default=250, help="minimum clean attempts")
    _add_window(p)
    p.add_argument("--output", default="-", help="scan CSV ('-' for stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("scan2d", help="scan offset x invalid-marker threshold",
                       formatter_class=_Formatter)
    p.add_argument("--input", required=True)
    _add_offsets(p)
    p.add_argument("--threshold-min", type=int, default=0)
    p.add_argument("--threshold-max", type=int, default=250)
    p.add_argument("--threshold-step", type=int, default=10)
    _add_window(p)
    p.add_argument("--output", default="-", help="scan CSV ('-' for stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_scan2d)

    p = sub.add_parser("hist", help="histogram p-values of a scan CSV", formatter_class=_Formatter)
    p.add_argument("--scan", required=True, help="scan CSV ('-' for stdin)")
    p.add_argument("--which", choices=("nosig", "chsh"), default="nosig")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_hist)

    defaults = SynthConfig()
    p = sub.add_parser("synth", help="generate a synthetic event file", formatter_class=_Formatter)
    p.add_argument("--out", default="-", help="event file ('-' for stdout)")
    p.add_argument("--config", help="key=value config file; flags override it")
    for flag, field, kind, text in _SYNTH_FLAGS:
        p.add_argument(flag, dest=field, type=kind, default=argparse.SUPPRESS,
                       help=f"{text} (default: {getattr(defaults, field)})")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"bellscan {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
