"""Command-line interface.

Exit codes: 0 success, 1 usage or validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

import numpy as np

from .errors import ParameterError, PipelineError, TsforgeError, ValidationError
from .filters import ButterworthSpec, design_sos, frequency_response
from .io import OutputExistsError, format_float, load_pipeline, load_project, save_outputs
from .pipeline import dry_run, execute
from .registry import registry_table

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

_TABLE_COLUMNS = ("id", "name", "type", "ts_inputs", "ts_outputs", "sf_outputs", "segments", "n_params", "params")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsforge", description="Batch time-series feature extraction.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a pipeline and write outputs")
    run.add_argument("manifest")
    run.add_argument("pipeline")
    run.add_argument("-o", "--output", required=True, help="output directory")
    run.add_argument("--force", action="store_true", help="overwrite a non-empty output directory")
    run.add_argument("--jobs", type=int, default=1, help="worker threads for the per-record phase")

    check = sub.add_parser("check", help="validate a pipeline and print the plan")
    check.add_argument("manifest")
    check.add_argument("pipeline")

    plugins = sub.add_parser("plugins", help="print the plugin reference")
    plugins.add_argument("--format", choices=("table", "csv"), default="table")

    fr = sub.add_parser("filter-response", help="Butterworth coefficients or frequency response as CSV")
    fr.add_argument("--type", dest="filter_type", choices=("LOWPASS", "HIGHPASS", "BANDPASS"), default="LOWPASS")
    fr.add_argument("--f1", type=float, required=True, help="cutoff (lower band edge) in Hz")
    fr.add_argument("--f2", type=float, help="upper band edge in Hz (BANDPASS)")
    fr.add_argument("--order", type=int, default=4)
    fr.add_argument("--fs", type=float, required=True, help="sample rate in Hz")
    fr.add_argument("--points", type=int, default=512, help="frequency grid size")
    fr.add_argument("--what", choices=("response", "coefficients"), default="response")
    fr.add_argument("-o", "--output", help="write CSV here instead of stdout")
    return p


def _format_table(rows, columns) -> str:
    cells = [[str(r[c]) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines)


def _cmd_plugins(args, out) -> int:
    rows = registry_table()
    if args.format == "csv":
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        out.write(_format_table(rows, _TABLE_COLUMNS) + "\n")
        out.write(f"\n{len(rows)} plugins\n")
    return EXIT_OK


def _cmd_check(args, out) -> int:
    dataset, _ = load_project(args.manifest)
    pipeline = load_pipeline(args.pipeline)
    plan = dry_run(pipeline, dataset)
    rows = [{"step": r.step, "plugin": r.plugin_id, "output": r.output, "kind": r.kind,
             "shape": "x".join(map(str, r.shape))} for r in plan]
    out.write(_format_table(rows, ("step", "plugin", "output", "kind", "shape")) + "\n")
    out.write(f"\nOK: {len(pipeline.steps)} steps, {len(plan)} outputs\n")
    return EXIT_OK


def _cmd_run(args, out) -> int:
    if args.jobs < 1:
        raise _UsageError("--jobs must be >= 1")
    dataset, models = load_project(args.manifest)
    pipeline = load_pipeline(args.pipeline)
    dry_run(pipeline, dataset)
    target = Path(args.output)
    if target.is_dir() and any(target.iterdir()) and not args.force:
        # refuse before spending time on the computation
        raise OutputExistsError(f"{target} is not empty; use --force to overwrite")
    result, report, used = execute(pipeline, dataset, models, jobs=args.jobs)
    save_outputs(result, target, source=dataset, source_manifest=Path(args.manifest),
                 models=used, force=args.force)
    for s in report.steps:
        out.write(f"step {s.step:>3} {s.plugin_id:<14} {s.wall_time * 1000:9.1f} ms  {', '.join(s.outputs)}\n")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    out.write(f"wrote {target}\n")
    return EXIT_OK


def _cmd_filter_response(args, out) -> int:
    spec = ButterworthSpec(args.filter_type, args.f1, args.f2, args.order)
    if not args.fs > 0:
        raise _UsageError("--fs must be positive")
    try:
        spec.check(args.fs)
    except ParameterError as exc:
        raise _UsageError(str(exc)) from None
    sos = design_sos(spec, args.fs)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.what == "coefficients":
        w.writerow(["section", "b0", "b1", "b2", "a0", "a1", "a2"])
        for i, row in enumerate(sos, start=1):
            w.writerow([i] + [format_float(v) for v in row])
    else:
        if args.points < 2:
            raise _UsageError("--points must be >= 2")
        freqs = np.linspace(0.0, args.fs / 2, args.points)
        h = frequency_response(sos, freqs, args.fs)
        mag = np.abs(h)
        with np.errstate(divide="ignore"):
            db = 20 * np.log10(mag)
        w.writerow(["freq_hz", "magnitude", "magnitude_db", "phase_rad"])
        for f, m, d, ph in zip(freqs, mag, db, np.angle(h)):
            w.writerow([format_float(f), format_float(m), format_float(d), format_float(ph)])
    if args.output:
        Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
    else:
        out.write(buf.getvalue())
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "check": _cmd_check, "plugins": _cmd_plugins,
             "filter-response": _cmd_filter_response}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INVALID
    except ValidationError as exc:
        print("validation failed:", file=sys.stderr)
        for issue in exc.issues:
            print(f"  {issue}", file=sys.stderr)
        return EXIT_INVALID
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (TsforgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
