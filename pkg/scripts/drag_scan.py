"""Probe phase versus drag speed and store length, with and without spreading.

The drag speed is given as a multiple of the adiabatic-limit speed
``c^2 travel / (l_s^2 eta xi)``; multiples below 1 violate adiabaticity.
Writes ``drag_scan.csv`` to the output directory.

    python scripts/drag_scan.py --out out/drag_scan
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from stationary_light.config import parse_config
from stationary_light.medium import derive
from stationary_light.propagator import Grid
from stationary_light.protocol import default_plan, design_drag, execute, kerr_params

COLUMNS = ("l_sprime_m", "vg_factor", "v_g_m_per_s", "spreading", "phi_numeric_rad", "phi_analytic_rad",
           "phi_bound_rad", "adiabatic_warning")


def point(cfg, d, l_sprime, factor, spreading, nz, n_steps):
    eta = d.g2n / (cfg.drive.plus[0] + cfg.drive.minus[0])
    L, l_s = cfg.medium.length, cfg.l_s
    l_sim = L + 10 * l_s
    auto = design_drag(d, Grid(nz, l_sim, 1.0), l_s, l_sprime, eta)
    vg = auto.v_g * factor
    grid = Grid(nz, l_sim, auto.travel / vg / n_steps)
    plan, _ = default_plan(d, grid, l_s, l_sprime, cfg.protocol.n_sprime, eta, drag_vg=vg)
    kerr = kerr_params(d, cfg.protocol.mode_radius, cfg.protocol.delta_over_gamma, cfg.protocol.include_loss)
    rep = execute(plan, d, grid, kerr, l_s, l_sprime, spreading=spreading).report
    return (l_sprime, factor, vg, spreading, rep.phi_numeric, rep.phi_analytic, rep.phi_bound, bool(rep.warnings))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="preset:paper-operating-point")
    ap.add_argument("--out", default="out/drag_scan")
    ap.add_argument("--nz", type=int, default=1024)
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()

    cfg = parse_config(args.config)
    d = derive(cfg.medium)
    L = cfg.medium.length
    rows = []
    for l_sprime in (L / 8, L / 4):
        for factor in (0.25, 0.5, 1.0, 2.0, 4.0):
            for spreading in (False, True):
                row = point(cfg, d, l_sprime, factor, spreading, args.nz, args.steps)
                rows.append(row)
                print(f"l_s'={l_sprime*1e6:5.1f} um  v x{factor:<5g} spreading={spreading!s:5}  "
                      f"phi={row[4]:.4f}  closed form={row[5]:.4f}  bound={row[6]:.3f}"
                      + ("  (non-adiabatic)" if row[7] else ""))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "drag_scan.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    print(f"pi / phi at the default point: {np.pi / rows[5 * 2 + 2 * 2 + 1][4]:.2f}")


if __name__ == "__main__":
    main()
