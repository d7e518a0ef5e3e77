"""Turn a :class:`ScenarioConfig` into concrete propagation and protocol runs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple


from .config import ScenarioConfig
from .medium import DerivedParams, derive
from .modes import guided_radius_exact
from .propagator import Grid, PolaritonState, gaussian_pulse, run
from .protocol import DragDesign, KerrParams, ProtocolRun, default_plan, design_drag, execute, kerr_params

log = logging.getLogger(__name__)

DEFAULT_STEPS = 1000


def drive_eta(cfg: ScenarioConfig, derived: DerivedParams) -> float:
    """eta of the configured drive at its first breakpoint."""
    total = cfg.drive.plus[0] + cfg.drive.minus[0]
    if not total > 0:
        raise ValueError("drive schedule starts with both intensities zero; eta undefined")
    return derived.g2n / total


def propagation_grid(cfg: ScenarioConfig) -> Grid:
    width = cfg.pulse_width
    l_sim = cfg.grid.l_sim if cfg.grid.l_sim is not None else cfg.medium.length + 8 * width
    duration = cfg.grid.duration
    dt = cfg.grid.dt
    if dt is None:
        dt = duration / DEFAULT_STEPS if duration > 0 else 1.0
    return Grid(cfg.grid.nz, l_sim, dt, cfg.grid.absorber)


def initial_state(cfg: ScenarioConfig, grid: Grid) -> PolaritonState:
    center = cfg.pulse.center if cfg.pulse.center is not None else 0.5 * grid.l_sim
    psi = gaussian_pulse(grid, center, cfg.pulse_width, cfg.pulse.amplitude)
    return PolaritonState.from_spin(-psi)


def run_propagation(cfg: ScenarioConfig, snapshot_stride: Optional[int] = None,
                    snapshot_dir: Optional[Path] = None):
    derived = derive(cfg.medium)
    grid = propagation_grid(cfg)
    state = initial_state(cfg, grid)
    stride = cfg.output.snapshot_stride if snapshot_stride is None else snapshot_stride
    if stride and snapshot_dir is not None:
        Path(snapshot_dir).mkdir(parents=True, exist_ok=True)
    return run(
        state, cfg.drive, derived, grid, cfg.grid.duration,
        report_stride=max(cfg.output.report_stride, 1),
        spreading=cfg.protocol.spreading,
        snapshot_stride=stride or 0,
        snapshot_dir=snapshot_dir,
    )


@dataclass
class ProtocolSetup:
    derived: DerivedParams
    grid: Grid
    kerr: KerrParams
    design: DragDesign
    eta: float
    mode_radius: float


def protocol_setup(cfg: ScenarioConfig) -> Tuple[ProtocolSetup, object]:
    derived = derive(cfg.medium)
    eta = drive_eta(cfg, derived)
    l_s, l_sprime = cfg.l_s, cfg.l_sprime
    l_sim = cfg.grid.l_sim if cfg.grid.l_sim is not None else cfg.medium.length + 10 * l_s
    probe_grid = Grid(cfg.grid.nz, l_sim, 1.0, cfg.grid.absorber)
    design = design_drag(derived, probe_grid, l_s, l_sprime, eta, cfg.protocol.drag_vg)
    dt = cfg.grid.dt if cfg.grid.dt is not None else design.duration / cfg.protocol.drag_steps
    grid = Grid(cfg.grid.nz, l_sim, dt, cfg.grid.absorber)
    plan, design = default_plan(derived, grid, l_s, l_sprime, cfg.protocol.n_sprime, eta, cfg.protocol.drag_vg)
    radius = cfg.protocol.mode_radius
    if radius is None:
        radius = guided_radius_exact(cfg.drive.a, derived).R
    kerr = kerr_params(derived, radius, cfg.protocol.delta_over_gamma, cfg.protocol.include_loss)
    return ProtocolSetup(derived, grid, kerr, design, eta, radius), plan


def run_protocol(cfg: ScenarioConfig) -> ProtocolRun:
    setup, plan = protocol_setup(cfg)
    return execute(plan, setup.derived, setup.grid, setup.kerr, cfg.l_s, cfg.l_sprime,
                   spreading=cfg.protocol.spreading, report_stride=max(cfg.output.report_stride, 1))
