"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 an assumption on
the leg geometry fails, 3 no stabilizing angle was found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

from wobbly.config import ConfigError, ExperimentConfig, load_config
from wobbly.ergodic import convergence_report
from wobbly.geometry import validate_assumptions
from wobbly.solver import NONE_FOUND, find_stabilizing_angles, sweep
from wobbly.svg import curves_svg
from wobbly.terrain import TerrainDomainError, TerrainFormatError
from wobbly.touchdown import touchdown

log = logging.getLogger("wobbly")

OUT_ENV = "WOBBLY_OUT_DIR"
DEFAULT_OUT = "wobbly-out"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTION = 2
EXIT_NONE_FOUND = 3

ERGODIC_CHECKPOINTS = (100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000)


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    directory = args.out or cfg.output.directory or os.environ.get(OUT_ENV) or DEFAULT_OUT
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise OSError(f"output directory {path} is not writable")
    return path


def _model(args, cfg: ExperimentConfig) -> str:
    return args.model or cfg.solver.model


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_validate(args, cfg: ExperimentConfig) -> int:
    geom = cfg.geometry
    report = validate_assumptions(geom, cfg.solver.rel_tol)
    out = {
        "geometry": geom.to_dict(),
        "diag_ac": geom.diag_ac,
        "diag_bd": geom.diag_bd,
        "tau": geom.tau,
        "mu": geom.mu,
        "x": list(geom.x_table),
        "report": report.to_dict(),
    }
    sys.stdout.write(_dump_json(out))
    return EXIT_OK if report.all_ok else EXIT_ASSUMPTION


def cmd_sweep(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    model = _model(args, cfg)
    table = sweep(cfg.geometry, cfg.build_terrain(), cfg.solver.n, model)
    _write(out / "sweep.csv", table.to_csv())
    if "svg" in cfg.output.formats:
        v = table.values
        svg = curves_svg(v.theta, {"h_ac": v.h_ac, "h_bd": v.h_bd, "h_delta": v.h_delta}, title=f"touchdown heights ({model})")
        _write(out / "sweep.svg", svg)
    return EXIT_OK


def _solve(cfg: ExperimentConfig, model: str):
    s = cfg.solver
    return find_stabilizing_angles(
        cfg.geometry,
        cfg.build_terrain(),
        n=s.n,
        tol=s.tol,
        model=model,
        max_lipschitz=s.max_lipschitz,
    )


def cmd_solve(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    result = _solve(cfg, _model(args, cfg))
    if result.lipschitz_warning:
        log.warning(
            "terrain Lipschitz bound %.6g exceeds the gate %.6g; no guarantee applies",
            result.lipschitz_bound, result.diagnostics["lipschitz_gate"],
        )
    payload = {"config": cfg.to_dict(), "result": result.to_dict()}
    _write(out / "solve.json", _dump_json(payload))
    if "csv" in cfg.output.formats:
        _write(out / "roots.csv", result.roots_csv())
    sys.stdout.write(f"{result.verdict}: {len(result.roots)} angle(s)\n")
    return EXIT_NONE_FOUND if result.verdict == NONE_FOUND else EXIT_OK


def cmd_ergodic(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    model = _model(args, cfg)
    geom, terrain = cfg.geometry, cfg.build_terrain()
    n_max = cfg.solver.ergodic_n
    n_list = [n for n in ERGODIC_CHECKPOINTS if n < n_max] + [n_max]
    report = convergence_report(lambda t: touchdown(geom, terrain, t, model).h_delta, cfg.solver.theta0_value(), n_list)
    _write(out / "ergodic.csv", report.to_csv())
    if "json" in cfg.output.formats:
        _write(out / "ergodic.json", _dump_json(report.to_dict()))
    mode = "finite-orbit" if report.finite_orbit else "irrational rotation"
    sys.stdout.write(f"{mode}: limit estimate {report.limit_estimate!r}, circle average {report.quadrature_reference!r}\n")
    return EXIT_OK


BATCH_COLUMNS = ("seed", "verdict", "n_roots", "epsilon_floor", "lipschitz_bound", "lipschitz_warning")


def cmd_batch(args, cfg: ExperimentConfig) -> int:
    if args.seeds is None or args.seeds < 1:
        raise ConfigError("--seeds must be a positive integer")
    out = _out_dir(args, cfg)
    model = _model(args, cfg)
    summary = io.StringIO()
    timing = io.StringIO()
    summary_w = csv.writer(summary, lineterminator="\n")
    timing_w = csv.writer(timing, lineterminator="\n")
    summary_w.writerow(BATCH_COLUMNS)
    timing_w.writerow(("seed", "runtime_s"))
    successes = 0
    for seed in range(1, args.seeds + 1):
        start = time.perf_counter()
        result = _solve(cfg.with_seed(seed), model)
        elapsed = time.perf_counter() - start
        successes += result.verdict != NONE_FOUND
        summary_w.writerow(
            (seed, result.verdict, len(result.roots), repr(result.epsilon_floor),
             repr(result.lipschitz_bound), int(result.lipschitz_warning))
        )
        timing_w.writerow((seed, f"{elapsed:.6f}"))
    _write(out / "batch.csv", summary.getvalue())
    _write(out / "batch_timing.csv", timing.getvalue())
    rate = successes / args.seeds
    sys.stdout.write(f"success rate: {successes}/{args.seeds} ({100.0 * rate:.1f}%)\n")
    return EXIT_OK if successes == args.seeds else EXIT_NONE_FOUND


COMMANDS = {
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "solve": cmd_solve,
    "ergodic": cmd_ergodic,
    "batch": cmd_batch,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for failed assumptions.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wobbly", description="Stabilize a four-legged table by rotating it.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log written files")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "check the leg geometry against the stabilization hypotheses"),
        ("sweep", "tabulate touchdown heights over a full turn"),
        ("solve", "find stabilizing rotation angles"),
        ("ergodic", "Birkhoff-average convergence of h_delta"),
        ("batch", "solve over seeded random terrains"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help=f"output directory (default: config, then ${OUT_ENV}, then ./{DEFAULT_OUT})")
        p.add_argument("--model", choices=("abstract", "rigid"), help="touchdown model (default from config)")
        if name == "batch":
            p.add_argument("--seeds", type=int, required=True, help="run seeds 1..SEEDS")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, TerrainFormatError, TerrainDomainError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
