"""
Command line entry point ``stationary-light``.

Subcommands: ``modes``, ``propagate``, ``protocol``, ``sweep`` and
``reproduce-paper``. Exit codes: 0 success, 1 invalid input, 2 solver
failure, 3 failed acceptance row.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import acceptance
from .config import ScenarioConfig, _quantity, parse_config, parse_text
from .errors import ConfigError, OracleDivergenceError, SolverError, StationaryLightError
from .medium import derive
from .modes import mode_table, write_mode_csv
from .propagator import write_trajectory_csv
from .scenario import run_propagation, run_protocol

log = logging.getLogger("stationary_light")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_ACCEPTANCE = 0, 1, 2, 3


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _out_dir(args, cfg: Optional[ScenarioConfig]) -> Path:
    out = Path(args.out) if args.out else Path(cfg.output.dir if cfg else "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_modes(args) -> int:
    cfg = parse_config(args.config)
    derived = derive(cfg.medium)
    if args.a:
        a_values = [_quantity(raw, "length", "--a", None) for raw in args.a.split(",")]
    else:
        a_values = [cfg.drive.a]
    out = _out_dir(args, cfg)
    write_mode_csv(out / "modes.csv", mode_table(a_values, derived))
    print(out / "modes.csv")
    return EXIT_OK


def cmd_propagate(args) -> int:
    cfg = parse_config(args.config)
    out = _out_dir(args, cfg)
    path = out / "trajectory.csv"
    if cfg.pulse.amplitude == 0:
        log.warning("initial pulse has zero amplitude; writing an empty trajectory")
        write_trajectory_csv(path, [])
        print(path)
        return EXIT_OK
    stride = cfg.output.snapshot_stride if args.snapshot_stride is None else args.snapshot_stride
    _, traj = run_propagation(cfg, snapshot_stride=stride, snapshot_dir=out / "snapshots" if stride else None)
    write_trajectory_csv(path, traj)
    print(path)
    return EXIT_OK


def cmd_protocol(args) -> int:
    cfg = parse_config(args.config)
    out = _out_dir(args, cfg)
    result = run_protocol(cfg)
    _write_json(out / "phase_shift.json", result.report.to_json_dict(cfg.to_text()))
    write_trajectory_csv(out / "protocol_trajectory.csv", result.trajectory)
    print(out / "phase_shift.json")
    return EXIT_OK


# sweep ---------------------------------------------------------------------


def override(text: str, section: str, key: str, raw: str) -> str:
    """Replace ``key`` in ``section`` of a config echo (one ``key = value`` per line)."""
    lines = text.split("\n")
    current = None
    for i, line in enumerate(lines):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1]
        elif current == section and stripped.split("=", 1)[0].strip() == key and "=" in stripped:
            if key == "schedule":
                raise ConfigError("the drive schedule cannot be swept", f"{section}.{key}")
            lines[i] = f"{key} = {raw}"
            return "\n".join(lines)
    raise ConfigError("no such parameter to sweep", f"{section}.{key}")


def sweep_values(expr: str, seed: int, unit: str = "") -> List[str]:
    """``a,b,c`` or ``random:N:lo:hi`` (uniform, seeded) as raw config strings."""
    if expr.startswith("random:"):
        try:
            _, n, lo, hi = expr.split(":")
            n, lo, hi = int(n), float(lo), float(hi)
        except ValueError:
            raise ConfigError(f"bad random range {expr!r}; expected random:N:lo:hi") from None
        rng = np.random.default_rng(seed)
        values = rng.uniform(lo, hi, size=n)
        return [f"{float(v)!r} {unit}".strip() for v in values]
    values = [v.strip() for v in expr.split(",") if v.strip()]
    if not values:
        raise ConfigError("empty sweep value list")
    return [f"{v} {unit}".strip() for v in values]


def _sweep_point(payload):
    index, raw, text = payload
    cfg = parse_text(text)
    report = run_protocol(cfg).report
    row = report.to_json_dict()
    row.pop("config_echo")
    row["index"] = index
    row["value"] = raw
    return index, row


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if "." not in args.param:
        raise ConfigError(f"--param must be section.key, got {args.param!r}")
    section, key = args.param.split(".", 1)
    values = sweep_values(args.values, args.seed, args.unit)
    base = cfg.to_text()
    texts = [override(base, section, key, raw) for raw in values]
    for raw, text in zip(values, texts):
        try:
            parse_text(text)
        except ConfigError as exc:
            raise ConfigError(f"sweep value {raw!r}: {exc}") from None

    out = _out_dir(args, cfg)
    rows_path = out / "sweep.jsonl"
    manifest_path = out / "sweep_manifest.json"
    digest = hashlib.sha256("\n".join([base, args.param] + values).encode()).hexdigest()
    completed: List[int] = []
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if manifest.get("digest") == digest:
            completed = list(manifest["completed"])
            log.info("resuming sweep: %d of %d points done", len(completed), len(values))
        else:
            log.warning("existing sweep manifest is for a different sweep; starting over")
            rows_path.unlink(missing_ok=True)
    elif rows_path.exists():
        rows_path.unlink()

    todo = [i for i in range(len(values)) if i not in completed]

    def save_manifest():
        _write_json(manifest_path, {"digest": digest, "param": args.param, "values": values,
                                    "completed": completed})

    save_manifest()
    workers = args.workers or os.cpu_count() or 1
    payloads = [(i, values[i], texts[i]) for i in todo]
    if workers == 1 or len(payloads) <= 1:
        results = map(_sweep_point, payloads)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_sweep_point, payloads)
    try:
        # map yields in submission order, so rows land in point order
        for index, row in results:
            with rows_path.open("a") as fh:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
            completed.append(index)
            save_manifest()
    finally:
        if pool is not None:
            pool.shutdown()
    print(rows_path)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    results = []
    for check in acceptance.CHECKS:
        res = acceptance.run_all((check,))[0]
        print(res.line(), flush=True)
        results.append(res)
    failed = [r.id for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} rows passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = [{"id": r.id, "name": r.name, "passed": r.passed, "measured": r.measured, "target": r.target}
                for r in results]
        _write_json(out / "acceptance.json", rows)
    return EXIT_ACCEPTANCE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="preset:paper-operating-point",
                        help="config file or preset:<name> (default: %(default)s)")
    common.add_argument("--out", help="output directory (default: output.dir from the config)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument("--workers", type=int, default=0, help="sweep worker processes (default: all cores)")
    common.add_argument("--snapshot-stride", type=int, default=None, help="write field snapshots every N steps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stationary-light", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("modes", parents=[common], help="guided-mode table as CSV")
    p.add_argument("--a", help="comma-separated control-beam radii with units, e.g. '100 um,20 um'")
    p.set_defaults(func=cmd_modes)
    p = sub.add_parser("propagate", parents=[common], help="propagate a pulse, write the trajectory CSV")
    p.set_defaults(func=cmd_propagate)
    p = sub.add_parser("protocol", parents=[common], help="run the phase-shift protocol, write JSON")
    p.set_defaults(func=cmd_protocol)
    p = sub.add_parser("sweep", parents=[common], help="run the protocol over a parameter range")
    p.add_argument("--param", required=True, help="section.key to vary, e.g. protocol.delta_over_gamma")
    p.add_argument("--values", required=True, help="'a,b,c' or 'random:N:lo:hi'")
    p.add_argument("--unit", default="", help="unit suffix appended to every value")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("reproduce-paper", parents=[common], help="run the reference acceptance table")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SolverError, OracleDivergenceError) as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER
    except (StationaryLightError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
