"""
Transversely guided stationary-pulse mode.

A control beam whose intensity falls off away from the axis makes eta grow
quadratically, ``eta(r) = eta0 (1 + (r/a)^2)``. For negative two-photon
detuning this is a harmonic well for the symmetric polariton combination and
the ground mode is a Gaussian ``exp(-(r/R)^2)``. The closed forms live here
together with a finite-difference eigen-oracle that checks them.

Bessel control beams enter only through the radius ``a`` of the first lobe,
which is used in the same quadratic expansion.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NoConfinedModeError, OracleDivergenceError
from .medium import C_LIGHT, DerivedParams, SlowLightCoefficients


@dataclass(frozen=True)
class GuidedMode:
    R: float
    amplitude_ratio: complex
    beta_wave: float
    confinement_parameter: float
    a: float


@dataclass(frozen=True)
class DispersionPoint:
    beta_wave: float
    omega: complex
    v_g: float
    diffusion: float


@dataclass(frozen=True)
class RadialOracleResult:
    ground_radius: float
    ground_eigenvalue: complex
    grid_spec: Tuple[int, float]
    refinement_radii: Tuple[float, ...]


def confinement_parameter(a: float, derived: DerivedParams) -> float:
    return derived.delta_k * derived.k0 * a**2


def guided_radius_exact(a: float, derived: DerivedParams) -> GuidedMode:
    """Guided radius ``R = a 2^(1/4) [sqrt(1 + p) - 1]^(-1/2)``, ``p = dK k0 a^2``."""
    if not a > 0:
        raise ValueError("a must be positive")
    p = confinement_parameter(a, derived)
    if not p > 0:
        raise NoConfinedModeError(f"confinement parameter {p:.3e} is not positive")
    # sqrt(1+p) - 1 written without cancellation for small p
    bracket = p / (np.sqrt(1.0 + p) + 1.0)
    R = a * 2.0**0.25 / np.sqrt(bracket)
    return GuidedMode(R=float(R), amplitude_ratio=1.0 + 0j, beta_wave=0.0,
                      confinement_parameter=float(p), a=float(a))


def guided_radius_strong(a: float, derived: DerivedParams) -> float:
    """Strong-confinement limit ``R = a (2 / p)^(1/4)``."""
    p = confinement_parameter(a, derived)
    if p < 100:
        warnings.warn(
            f"confinement parameter {p:.3g} < 100; strong-confinement radius is inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(a * (2.0 / p) ** 0.25)


def min_guided_radius(derived: DerivedParams) -> float:
    """Radius where the strong-confinement mode becomes as small as the beam, R = a."""
    return float(np.sqrt(2.0 / (derived.delta_k * derived.k0)))


def rayleigh_range(waist: float, wavelength: float) -> float:
    if not waist > 0:
        raise ValueError("waist must be positive")
    return float(np.pi * waist**2 / wavelength)


def diffraction_extension(a: float, derived: DerivedParams) -> float:
    """Ratio of the control-beam Rayleigh range to that of the guided mode."""
    R = guided_radius_exact(a, derived).R
    return rayleigh_range(a, derived.wavelength) / rayleigh_range(R, derived.wavelength)


def radius_from_frequency(a: float, omega: float, eta: float, derived: DerivedParams) -> float:
    """Harmonic-well radius ``(-2 a^2 c / (k0 eta omega))^(1/4)``.

    Only the negative-detuning branch (``eta * omega < 0``) confines; the other
    sign is rejected.
    """
    x = eta * omega
    if not x < 0:
        raise NoConfinedModeError(
            f"eta*omega = {x:.3e} must be negative (phasematched, negative two-photon detuning)"
        )
    return float((-2.0 * a**2 * C_LIGHT / (derived.k0 * x)) ** 0.25)


def mode_frequency(mode: GuidedMode, coeffs: SlowLightCoefficients, derived: DerivedParams) -> float:
    """Sideband frequency of the guided mode at zero longitudinal wavevector."""
    return float(dispersion(0.0, mode, coeffs, derived).omega.real)


def dispersion(
    beta_wave: float,
    mode: GuidedMode,
    coeffs: SlowLightCoefficients,
    derived: DerivedParams,
    xi_infinite: bool = False,
) -> DispersionPoint:
    """Complex sideband frequency on the guided branch.

    ``eta*omega = (2c/(k0 R^2) - dK c) - i (c beta)^2 / xi + (a+ - a-) c beta``.
    ``xi_infinite`` drops the absorptive term (and the diffusion).
    """
    if not np.isfinite(mode.R):
        raise NoConfinedModeError("dispersion needs a finite guided radius")
    c = C_LIGHT
    eta = coeffs.eta
    offset = 2.0 * c / (derived.k0 * mode.R**2) - derived.delta_k * c
    damping = 0.0 if xi_infinite else (c * beta_wave) ** 2 / derived.xi
    eta_omega = offset - 1j * damping + coeffs.imbalance * c * beta_wave
    diffusion = 0.0 if xi_infinite else 4 * coeffs.alpha_plus * coeffs.alpha_minus * c**2 / (eta * derived.xi)
    return DispersionPoint(
        beta_wave=float(beta_wave),
        omega=complex(eta_omega / eta),
        v_g=coeffs.v_g,
        diffusion=float(diffusion),
    )


def spreading_fraction(t: float, length: float, coeffs: SlowLightCoefficients, derived: DerivedParams) -> float:
    """Order-of-magnitude relative growth ``dl/l ~ sqrt(c^2 t / (eta xi l^2))``."""
    return float(np.sqrt(C_LIGHT**2 * t / (coeffs.eta * derived.xi * length**2)))


# ---------------------------------------------------------------------------
# finite-difference radial oracle


def _radial_ground_state(n: int, extent: float, diff: float, curvature: float):
    """Lowest eigenpair of ``-diff * (1/r) d/dr (r d/dr) + curvature * r^2``.

    Cell-centred grid, flux form. The axis face has zero area so the
    symmetry (Neumann) condition is built in; the outer edge is Dirichlet.
    The ``sqrt(r)`` similarity transform makes the matrix symmetric.
    """
    h = extent / n
    r = (np.arange(n) + 0.5) * h
    faces = np.arange(1, n + 1) * h
    inner = np.concatenate(([0.0], faces[:-1]))
    outer = faces
    # outer Dirichlet: ghost value -psi at r = extent + h/2, face at extent
    main = diff * (inner + outer) / (r * h**2)
    main[-1] += diff * outer[-1] / (r[-1] * h**2)
    main += curvature * r**2
    off = -diff * faces[:-1] / (h**2 * np.sqrt(r[:-1] * r[1:]))
    w, v = eigh_tridiagonal(main, off, select="i", select_range=(0, 0))
    psi = v[:, 0] / np.sqrt(r)
    weight = np.abs(psi) ** 2 * r
    mean_r2 = np.sum(weight * r**2) / np.sum(weight)
    return float(w[0]), float(np.sqrt(2.0 * mean_r2))


def radial_oracle(
    a: float,
    omega: float,
    coeffs: SlowLightCoefficients,
    derived: DerivedParams,
    grid: Optional[Tuple[int, float]] = None,
    curvature_scale: float = 1.0,
    tol: float = 5e-3,
) -> RadialOracleResult:
    """Brute-force transverse eigensolve for the symmetric polariton mode.

    Discretizes ``-(c/2k0) lap_T psi - eta0 omega (r/a)^2 psi`` on a radial
    finite-difference grid and returns the 1/e field radius of the lowest
    mode, ``sqrt(2 <r^2>)``. The grid is refined twice and its extent doubled
    once; if any of these changes the radius by more than ``tol`` the mode is
    not a converged bound state and :class:`OracleDivergenceError` is raised.

    ``grid`` is ``(n_points, extent)``; by default ``(200, 6 R)`` with R from
    the harmonic-well formula. ``curvature_scale`` multiplies the quadratic term.
    """
    diff = C_LIGHT / (2.0 * derived.k0)
    curvature = -coeffs.eta * omega / a**2 * curvature_scale
    if grid is None:
        if not (np.isfinite(curvature) and curvature > 0):
            raise OracleDivergenceError(
                "no confining curvature; pass an explicit grid extent to probe the continuum"
            )
        R_guess = (4.0 * diff / curvature) ** 0.25
        grid = (200, 6.0 * R_guess)
    n, extent = int(grid[0]), float(grid[1])

    radii = []
    eig = None
    for m in (n, 2 * n, 4 * n):
        eig, rad = _radial_ground_state(m, extent, diff, curvature)
        radii.append(rad)
    _, rad_wide = _radial_ground_state(4 * n, 2 * extent, diff, curvature)
    radii.append(rad_wide)

    finest = radii[2]
    if abs(radii[2] - radii[1]) > tol * finest or abs(rad_wide - finest) > tol * finest:
        raise OracleDivergenceError(
            f"ground radius not converged: refinements {radii[:3]}, doubled extent {rad_wide}"
        )
    return RadialOracleResult(
        ground_radius=finest,
        ground_eigenvalue=complex(eig),
        grid_spec=(4 * n, extent),
        refinement_radii=tuple(radii),
    )


# ---------------------------------------------------------------------------
# tabular output

MODE_TABLE_COLUMNS = (
    "a_m",
    "R_m",
    "confinement_parameter",
    "z0_control_m",
    "z0_guided_m",
    "extension_factor",
)


def mode_table(a_values: Iterable[float], derived: DerivedParams) -> list:
    rows = []
    for a in a_values:
        mode = guided_radius_exact(a, derived)
        z0a = rayleigh_range(a, derived.wavelength)
        z0r = rayleigh_range(mode.R, derived.wavelength)
        rows.append((a, mode.R, mode.confinement_parameter, z0a, z0r, z0a / z0r))
    return rows


def write_mode_csv(path, rows: Sequence[Sequence[float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MODE_TABLE_COLUMNS)
        for row in rows:
            writer.writerow([repr(float(x)) for x in row])
