"""Command-line runner.

    cstarlab <suite> [--config PATH] [--out DIR] [--parallel] [--seed N]
    cstarlab plot <kind> [--out DIR]

Exit status: 0 all checks pass, 1 some check failed, 2 usage error or
unknown suite, 3 invalid config, 4 I/O failure.  The output directory may
be overridden with the ``CSTARLAB_OUT`` environment variable.

Reports are deterministic: the timestamp comes from ``SOURCE_DATE_EPOCH``
(or the Unix epoch) unless ``--wall-clock`` is passed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .config import SUITES, ConfigError, ExperimentConfig, config_to_dict, load_config
from .reports import _plain

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3, 4
OUT_ENV = "CSTARLAB_OUT"


def report_timestamp(wall_clock: bool = False) -> str:
    if wall_clock:
        now = datetime.now(timezone.utc)
    else:
        now = datetime.fromtimestamp(int(os.environ.get("SOURCE_DATE_EPOCH", "0")), timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


def build_report(result, cfg: ExperimentConfig, timestamp: str) -> dict:
    checks = []
    for c in result.checks:
        d = c.to_dict()
        entry = {"name": d.pop("check")}
        entry.update(d)
        checks.append(entry)
    return {
        "suite": result.suite,
        "checks": checks,
        "seed": cfg.seed,
        "timestamp": timestamp,
        "pass": result.passed,
        "config": _plain(config_to_dict(cfg)),
    }


def csv_text(header, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    buf.write("# columns: " + ", ".join(header) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _write_all(out: Path, files: dict[str, str]) -> None:
    """Write every file or none: stage to temporaries, then rename."""
    out.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            tmp = out / f".{name}.tmp"
            tmp.write_text(text)
            staged.append((tmp, out / name))
        for tmp, final in staged:
            tmp.replace(final)
    finally:
        for tmp, _ in staged:
            if tmp.exists():
                tmp.unlink()


def _out_dir(arg: str | None, cfg_out: str | None = None) -> Path:
    return Path(os.environ.get(OUT_ENV) or arg or cfg_out or "results")


def run_suite(cfg: ExperimentConfig, out: Path, wall_clock: bool = False, stream=sys.stdout) -> int:
    from . import suites

    result = suites.run(cfg)
    report = build_report(result, cfg, report_timestamp(wall_clock))
    files = {f"{cfg.suite}.json": json.dumps(report, indent=2) + "\n"}
    for name, (header, rows) in result.plots.items():
        files[f"{cfg.suite}_{name}.csv"] = csv_text(header, rows, f"{cfg.suite} {name}")
    try:
        _write_all(out, files)
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    for c in result.checks:
        print(c.line(), file=stream)
    print(f"{'PASS' if result.passed else 'FAIL'}  suite {cfg.suite}", file=stream)
    return EXIT_OK if result.passed else EXIT_FAIL


PLOT_COMMENTS = {
    "field-graph": "x and the coefficients V1(x) = cbrt(x) + 1, V2(x) = cbrt(x) - 1",
    "integral-curves": "flow x(t) from each seed under V1 and V2",
    "convergence": "tilde-formula residual against mesh size n, sigma3/sigma1 instance",
}


def run_plot(kind: str, out: Path) -> int:
    from .suites import emit_plot_data

    header, rows = emit_plot_data(kind)
    try:
        _write_all(out, {f"plot_{kind}.csv": csv_text(header, rows, PLOT_COMMENTS[kind])})
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out / f'plot_{kind}.csv'}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    from .suites import PLOT_KINDS

    p = argparse.ArgumentParser(prog="cstarlab", description="Run a verification suite.")
    sub = p.add_subparsers(dest="command", required=True, metavar="{suite,plot}")
    for name in SUITES:
        s = sub.add_parser(name, help=f"run the {name} suite")
        s.add_argument("--config", help="key = value config file")
        s.add_argument("--out", help=f"output directory (overridden by ${OUT_ENV})")
        s.add_argument("--parallel", action="store_true", help="run independent trials in threads")
        s.add_argument("--seed", type=int, help="override the config seed")
        s.add_argument("--wall-clock", action="store_true", help="stamp the report with the current time")
    pl = sub.add_parser("plot", help="emit standalone plot data")
    pl.add_argument("kind", choices=PLOT_KINDS)
    pl.add_argument("--out", help=f"output directory (overridden by ${OUT_ENV})")
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "plot":
        return run_plot(args.kind, _out_dir(args.out))
    try:
        cfg = load_config(args.config, args.command) if args.config else ExperimentConfig(args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.parallel:
            cfg.parallel = True
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    return run_suite(cfg, _out_dir(args.out, cfg.out_dir), args.wall_clock)


if __name__ == "__main__":
    sys.exit(main())
