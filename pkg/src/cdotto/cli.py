"""Batch front-end: run cycle sweeps from a config file and emit result tables.

Usage:

  cdotto run --config runs.cfg [--preset fig2|fig3|fig4|fig5] [--out DIR]
             [--format csv|json] [--workers K] [--steps-per-unit-time S]

Exactly the columns below are written, one row per grid point, floats in
shortest round-trip decimals so reruns are byte-identical.  A JSON manifest
(config digest, timings, per-point failures) is written last.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import PRESETS, config_digest, parse_config_text, resolve_blocks
from .cycle import CycleReport, RunOptions, sweep
from .errors import ConfigError

CSV_COLUMNS = (
    "N", "p", "tau1", "tau3", "tau2", "tau4", "Tc", "Th",
    "Qc", "Qh", "W1", "W3", "W0_total", "WCD_total", "J",
    "cop", "cop_defined", "cop_carnot", "Qc_adiabatic",
    "cost1", "cost3", "steps", "converged",
)


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    config_digest: str
    grid_size: int
    workers: int
    started: str
    finished: str
    failures: list
    options: dict

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "config_digest": self.config_digest,
            "grid_size": self.grid_size,
            "workers": self.workers,
            "started": self.started,
            "finished": self.finished,
            "failures": self.failures,
            "options": self.options,
        }


def _cell(value) -> str:
    if value is None:
        return "unchecked"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_values(report: CycleReport) -> dict:
    return {
        "N": report.n_sites,
        "p": report.p,
        "tau1": report.tau1,
        "tau3": report.tau3,
        "tau2": report.tau2,
        "tau4": report.tau4,
        "Tc": report.Tc,
        "Th": report.Th,
        "Qc": report.Qc,
        "Qh": report.Qh,
        "W1": report.W1,
        "W3": report.W3,
        "W0_total": report.W0_total,
        "WCD_total": report.WCD_total,
        "J": report.J,
        "cop": report.cop,
        "cop_defined": report.cop_defined,
        "cop_carnot": report.cop_carnot,
        "Qc_adiabatic": report.Qc_adiabatic,
        "cost1": report.cost1,
        "cost3": report.cost3,
        "steps": report.steps,
        "converged": report.converged,
    }


def emit_results(reports, fmt: str, out_dir: Path, manifest: RunManifest):
    """Write the result table and then the manifest; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [_row_values(r) for r in reports if r is not None]
    if fmt == "csv":
        results_path = out_dir / "results.csv"
        lines = [",".join(CSV_COLUMNS)]
        for row in rows:
            lines.append(",".join(
                "" if (col == "cop" and row[col] is None) else _cell(row[col])
                for col in CSV_COLUMNS
            ))
        results_path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        results_path = out_dir / "results.json"
        with results_path.open("w") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    manifest_path = out_dir / "manifest.json"
    with manifest_path.open("w") as fh:
        json.dump(manifest.to_dict(), fh, indent=1)
        fh.write("\n")
    return results_path, manifest_path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdotto",
        description="Finite-time quantum Otto refrigerator sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a sweep and write result tables")
    run.add_argument("--config", type=Path, help="key=value config file")
    run.add_argument("--preset", choices=sorted(PRESETS),
                     help="built-in figure grid; --config keys override it")
    run.add_argument("--out", type=Path, default=Path("results"),
                     help="output directory (default: results)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: available parallelism)")
    run.add_argument("--steps-per-unit-time", type=float, default=None,
                     help="fix the integrator step rate and skip the "
                          "step-doubling convergence check")
    return parser


def _resolve_inputs(args):
    blocks: list[dict] = []
    if args.preset:
        blocks = [parse_config_text(text) for text in PRESETS[args.preset]]
    overrides: dict = {}
    if args.config is not None:
        overrides = parse_config_text(args.config.read_text())
    if blocks:
        for block in blocks:
            block.update(overrides)
    elif overrides or args.config is not None:
        blocks = [overrides]
    else:
        raise ConfigError("one of --config or --preset is required")
    return blocks


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        blocks = _resolve_inputs(args)
        configs = resolve_blocks(blocks)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.steps_per_unit_time is not None:
        options = RunOptions(steps_per_unit_time=args.steps_per_unit_time,
                             converge=False)
    else:
        options = RunOptions()
    options_echo = {
        "steps_per_unit_time": options.steps_per_unit_time,
        "min_steps": options.min_steps,
        "max_steps": options.max_steps,
        "converge": options.converge,
        "converge_tol": options.converge_tol,
    }
    digest = config_digest(blocks, options_echo)
    workers = args.workers or os.cpu_count() or 1

    # fail on an unusable output directory before any cycle is computed
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        probe = args.out / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2

    started = datetime.now(timezone.utc).isoformat()
    result = sweep(configs, options, workers=workers)
    finished = datetime.now(timezone.utc).isoformat()

    manifest = RunManifest(
        tool_version=__version__,
        config_digest=digest,
        grid_size=len(configs),
        workers=workers,
        started=started,
        finished=finished,
        failures=[{"index": idx, "label": configs[idx].label, "error": msg}
                  for idx, msg in result.failures],
        options=options_echo,
    )
    results_path, manifest_path = emit_results(result.reports, args.format,
                                               args.out, manifest)
    done = len(configs) - len(result.failures)
    print(f"{done}/{len(configs)} grid points completed")
    for idx, msg in result.failures:
        print(f"  failed [{idx}] {configs[idx].label}: {msg}", file=sys.stderr)
    print(f"results:  {results_path}")
    print(f"manifest: {manifest_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
