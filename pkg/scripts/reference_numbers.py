"""Print the closed-form reference numbers for the 0.8 um, 1e14 cm^-3, 300 um slab.

    python scripts/reference_numbers.py
"""

import numpy as np

from stationary_light.config import parse_config
from stationary_light.medium import derive
from stationary_light.modes import (
    diffraction_extension,
    guided_radius_exact,
    guided_radius_strong,
    min_guided_radius,
    rayleigh_range,
)
from stationary_light.protocol import kerr_params, loss_probability, phase_bound


def main():
    cfg = parse_config("preset:paper-operating-point")
    d = derive(cfg.medium)
    L = cfg.medium.length
    print(f"sigma        = {d.sigma:.4e} m^2")
    print(f"d0           = {d.d0:.1f}")
    print(f"xi           = {d.xi:.4e} 1/s")
    print(f"g^2 N        = {d.g2n:.4e} rad^2/s^2")
    for a in (100e-6, 20e-6):
        mode = guided_radius_exact(a, d)
        print(f"a = {a*1e6:5.1f} um: R = {mode.R*1e6:.3f} um (strong limit {guided_radius_strong(a, d)*1e6:.3f} um), "
              f"p = {mode.confinement_parameter:.4g}, extension {diffraction_extension(a, d):.2f}")
    print(f"R_min        = {min_guided_radius(d)*1e6:.3f} um")
    print(f"z0(100 um)   = {rayleigh_range(100e-6, d.wavelength)*100:.4f} cm")
    print(f"z0(13 um)    = {rayleigh_range(13e-6, d.wavelength)*100:.4f} cm")
    kerr = kerr_params(d, 2e-6, 16.0)
    print(f"sigma/piR^2  = {d.sigma / kerr.mode_area:.4f}")
    print(f"phase bound  = {phase_bound(kerr, d.sigma, d.d0, L, L / 4, L):.3f} rad (l_s = L, l_s' = L/4)")
    for ratio in (16.0, 160.0):
        print(f"loss(pi, Delta = {ratio:g} gamma) = {loss_probability(np.pi, kerr_params(d, 2e-6, ratio)):.4f}")


if __name__ == "__main__":
    main()
