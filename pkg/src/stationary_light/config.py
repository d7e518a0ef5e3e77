"""
Scenario configuration: sectioned key-value text with explicit unit suffixes.

Example::

    [medium]
    wavelength = 0.8 um
    gamma = 1.9e7 rad_per_s
    density = 1e14 per_cm3
    length = 300 um
    n_s = 1.012
    n_c = 1.0

    [drive]
    profile = gaussian
    a = 100 um
    schedule =
        0 s, 1.0e15 rad2_per_s2, 1.0e15 rad2_per_s2

    [grid]
    nz = 1024
    l_sim = auto
    dt = auto
    duration = 1 ms

    [protocol]
    delta_over_gamma = 16
    n_sprime = 1

    [output]
    dir = out

Everything is converted to SI on load. Dimensional values must carry a unit
suffix; dimensionless ones must not.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple


from .errors import ConfigError
from .medium import ControlDrive, MediumParams, derive

# unit -> power of ten relative to SI
UNITS = {
    "length": {"m": 0, "cm": -2, "mm": -3, "um": -6, "nm": -9},
    "time": {"s": 0, "ms": -3, "us": -6, "ns": -9},
    "rate": {"rad_per_s": 0},
    "density": {"per_m3": 0, "per_cm3": 6},
    "intensity": {"rad2_per_s2": 0},
    "velocity": {"m_per_s": 0},
}
# canonical SI suffix used when echoing
SI_SUFFIX = {"length": "m", "time": "s", "rate": "rad_per_s", "density": "per_m3",
             "intensity": "rad2_per_s2", "velocity": "m_per_s"}

REQUIRED_SECTIONS = ("medium", "drive", "grid", "protocol", "output")
OPTIONAL_SECTIONS = ("pulse",)

# key -> (kind, required, default). kind is a unit family, "float", "int", "bool", "str"
SCHEMA: Dict[str, Dict[str, Tuple[str, bool, object]]] = {
    "medium": {
        "wavelength": ("length", True, None),
        "gamma": ("rate", True, None),
        "density": ("density", True, None),
        "length": ("length", True, None),
        "n_s": ("float", True, None),
        "n_c": ("float", True, None),
        "omega_ratio": ("float", False, 1.0),
    },
    "drive": {
        "profile": ("str", False, "gaussian"),
        "a": ("length", True, None),
        "schedule": ("schedule", True, None),
    },
    "grid": {
        "nz": ("int", True, None),
        "l_sim": ("length?", False, None),
        "dt": ("time?", False, None),
        "duration": ("time", False, 0.0),
        "absorber": ("float", False, 0.0),
    },
    "pulse": {
        "center": ("length?", False, None),
        "width": ("length?", False, None),
        "amplitude": ("float", False, 1.0),
    },
    "protocol": {
        "delta_over_gamma": ("float", True, None),
        "n_sprime": ("float", True, None),
        "l_s": ("length?", False, None),
        "l_sprime": ("length?", False, None),
        "drag_vg": ("velocity?", False, None),
        "mode_radius": ("length?", False, None),
        "include_loss": ("bool", False, True),
        "spreading": ("bool", False, True),
        "drag_steps": ("int", False, 2000),
    },
    "output": {
        "dir": ("str", True, None),
        "snapshot_stride": ("int", False, 0),
        "report_stride": ("int", False, 10),
    },
}


@dataclass(frozen=True)
class GridConfig:
    nz: int
    l_sim: Optional[float] = None
    dt: Optional[float] = None
    duration: float = 0.0
    absorber: float = 0.0


@dataclass(frozen=True)
class PulseConfig:
    center: Optional[float] = None
    width: Optional[float] = None
    amplitude: float = 1.0


@dataclass(frozen=True)
class ProtocolConfig:
    delta_over_gamma: float
    n_sprime: float
    l_s: Optional[float] = None
    l_sprime: Optional[float] = None
    drag_vg: Optional[float] = None
    mode_radius: Optional[float] = None
    include_loss: bool = True
    spreading: bool = True
    drag_steps: int = 2000


@dataclass(frozen=True)
class OutputConfig:
    dir: str
    snapshot_stride: int = 0
    report_stride: int = 10


@dataclass(frozen=True)
class ScenarioConfig:
    medium: MediumParams
    drive: ControlDrive
    grid: GridConfig
    protocol: ProtocolConfig
    output: OutputConfig
    pulse: PulseConfig = field(default_factory=PulseConfig)

    # resolved defaults ---------------------------------------------------

    @property
    def l_s(self) -> float:
        return self.protocol.l_s if self.protocol.l_s is not None else self.medium.length

    @property
    def l_sprime(self) -> float:
        return self.protocol.l_sprime if self.protocol.l_sprime is not None else self.medium.length / 4

    @property
    def pulse_width(self) -> float:
        return self.pulse.width if self.pulse.width is not None else self.medium.length / 3

    def to_text(self) -> str:
        """Echo in SI units; parses back to an equal config."""
        sections = {
            "medium": [(f.name, getattr(self.medium, f.name)) for f in fields(self.medium)],
            "drive": [("profile", self.drive.profile), ("a", self.drive.a), ("schedule", self.drive)],
            "grid": [(f.name, getattr(self.grid, f.name)) for f in fields(self.grid)],
            "pulse": [(f.name, getattr(self.pulse, f.name)) for f in fields(self.pulse)],
            "protocol": [(f.name, getattr(self.protocol, f.name)) for f in fields(self.protocol)],
            "output": [(f.name, getattr(self.output, f.name)) for f in fields(self.output)],
        }
        out = []
        for name, items in sections.items():
            out.append(f"[{name}]")
            for key, value in items:
                out.append(f"{key} = {_format(SCHEMA[name][key][0], value)}")
            out.append("")
        return "\n".join(out)


def _format(kind: str, value) -> str:
    if kind == "schedule":
        rows = [
            f"    {t!r} s, {p!r} rad2_per_s2, {m!r} rad2_per_s2"
            for t, p, m in zip(value.times, value.plus, value.minus)
        ]
        return "\n" + "\n".join(rows)
    if value is None:
        return "auto"
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("str", "int"):
        return str(value)
    if kind == "float":
        return repr(float(value))
    family = kind.rstrip("?")
    return f"{float(value)!r} {SI_SUFFIX[family]}"


# ---------------------------------------------------------------------------
# parsing

_NUM_UNIT = re.compile(r"^\s*([-+0-9.eE]+)\s*([A-Za-z0-9_]*)\s*$")


def _line_index(text: str) -> Dict[Tuple[str, str], int]:
    index = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]", stripped)
        if m:
            section = m.group(1).strip().lower()
            index[(section, "")] = lineno
            continue
        if section and stripped and not line[0].isspace() and not stripped.startswith(("#", ";")):
            key = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
            index.setdefault((section, key), lineno)
    return index


def _quantity(raw: str, family: str, where: str, line) -> float:
    m = _NUM_UNIT.match(raw)
    if not m:
        raise ConfigError(f"cannot parse quantity {raw!r}", where, line)
    number, unit = m.groups()
    try:
        value = float(number)
    except ValueError:
        raise ConfigError(f"cannot parse number {number!r}", where, line) from None
    if family in ("float", "int"):
        if unit:
            raise ConfigError(f"unit mismatch: dimensionless value given unit {unit!r}", where, line)
        return value
    allowed = UNITS[family]
    if not unit:
        raise ConfigError(
            f"unit mismatch: {family} value {raw.strip()!r} needs a unit suffix ({', '.join(allowed)})",
            where, line)
    if unit not in allowed:
        raise ConfigError(
            f"unit mismatch: {unit!r} is not a {family} unit ({', '.join(allowed)})", where, line)
    # decimal shift, so "0.8 um" is the float nearest 8e-7
    return float(Decimal(number).scaleb(allowed[unit]))


def _parse_value(kind: str, raw: str, where: str, line):
    if kind == "schedule":
        return _parse_schedule(raw, where, line)
    raw = raw.strip()
    optional = kind.endswith("?")
    family = kind.rstrip("?")
    if optional and raw.lower() == "auto":
        return None
    if family == "str":
        return raw
    if family == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}", where, line)
    if family == "int":
        value = _quantity(raw, "int", where, line)
        if value != int(value):
            raise ConfigError(f"expected an integer, got {raw!r}", where, line)
        return int(value)
    return _quantity(raw, family, where, line)


def _parse_schedule(raw: str, where: str, line):
    rows = [(i, r.strip()) for i, r in enumerate(raw.splitlines()) if r.strip()]
    if not rows:
        raise ConfigError("schedule needs at least one breakpoint", where, line)
    points = []
    for offset, row in rows:
        parts = [p.strip() for p in row.split(",")]
        row_line = None if line is None else line + offset
        if len(parts) != 3:
            raise ConfigError(f"schedule row {row!r} must be 't, plus, minus'", where, row_line)
        points.append((
            _quantity(parts[0], "time", where, row_line),
            _quantity(parts[1], "intensity", where, row_line),
            _quantity(parts[2], "intensity", where, row_line),
        ))
    return points


def parse_text(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    lines = _line_index(text)

    present = set(parser.sections())
    missing = [s for s in REQUIRED_SECTIONS if s not in present]
    if missing:
        raise ConfigError(
            "missing section(s): " + ", ".join(missing)
            + f" (required: {', '.join(REQUIRED_SECTIONS)})")
    unknown = sorted(present - set(REQUIRED_SECTIONS) - set(OPTIONAL_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}", unknown[0], lines.get((unknown[0], "")))

    values: Dict[str, Dict[str, object]] = {}
    for section, schema in SCHEMA.items():
        values[section] = {}
        if section not in present:
            continue
        for key in parser[section]:
            if key not in schema:
                raise ConfigError(f"unknown key {key!r}", f"{section}.{key}", lines.get((section, key)))
        for key, (kind, required, default) in schema.items():
            where = f"{section}.{key}"
            line = lines.get((section, key))
            if key in parser[section]:
                values[section][key] = _parse_value(kind, parser[section][key], where, line)
            elif required:
                raise ConfigError("missing required key", where, lines.get((section, "")))
            else:
                values[section][key] = default

    return _build(values, lines)


def _build(values, lines) -> ScenarioConfig:
    def guard(section, key, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), f"{section}.{key}", lines.get((section, key))) from None

    med = values["medium"]
    medium = guard("medium", "wavelength", lambda: MediumParams(**med))
    guard("medium", "n_s", lambda: derive(medium))

    drv = values["drive"]
    sched = drv["schedule"]
    drive = guard("drive", "schedule", lambda: ControlDrive(
        times=[p[0] for p in sched], plus=[p[1] for p in sched], minus=[p[2] for p in sched],
        profile=drv["profile"], a=drv["a"]))

    grid = guard("grid", "nz", lambda: _validated_grid(GridConfig(**values["grid"])))
    pulse = PulseConfig(**values["pulse"]) if values["pulse"] else PulseConfig()
    protocol = guard("protocol", "delta_over_gamma", lambda: _validated_protocol(ProtocolConfig(**values["protocol"])))
    output = guard("output", "dir", lambda: OutputConfig(**values["output"]))
    cfg = ScenarioConfig(medium=medium, drive=drive, grid=grid, protocol=protocol, output=output, pulse=pulse)
    guard("protocol", "l_sprime", lambda: _check_lengths(cfg))
    return cfg


def _validated_grid(g: GridConfig) -> GridConfig:
    if g.nz < 2:
        raise ValueError("nz must be at least 2")
    if g.l_sim is not None and not g.l_sim > 0:
        raise ValueError("l_sim must be positive")
    if g.dt is not None and not g.dt > 0:
        raise ValueError("dt must be positive")
    if g.duration < 0:
        raise ValueError("duration must be nonnegative")
    if not 0 <= g.absorber < 0.5:
        raise ValueError("absorber must be in [0, 0.5)")
    return g


def _validated_protocol(p: ProtocolConfig) -> ProtocolConfig:
    if not p.delta_over_gamma > 0:
        raise ValueError("delta_over_gamma must be positive")
    if p.n_sprime < 0:
        raise ValueError("n_sprime must be nonnegative")
    if p.drag_vg is not None and not p.drag_vg > 0:
        raise ValueError("drag_vg must be positive")
    if p.drag_steps < 1:
        raise ValueError("drag_steps must be positive")
    return p


def _check_lengths(cfg: ScenarioConfig) -> None:
    if not 0 < cfg.l_sprime <= cfg.l_s <= cfg.medium.length:
        raise ValueError("need 0 < l_sprime <= l_s <= medium length")


PRESETS = ("paper-guided-mode", "paper-bessel", "paper-operating-point")


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("stationary_light.presets").joinpath(f"{name}.ini").read_text()


def parse_config(path) -> ScenarioConfig:
    """Load a config file, or a bundled preset given as ``preset:<name>``."""
    source = str(path)
    if source.startswith("preset:"):
        return parse_text(preset_text(source.split(":", 1)[1]))
    p = Path(source)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_text(p.read_text())
