"""
Physical parameters of the Lambda-type atomic medium and the control drive.

All quantities are SI. The units used in the module are

==================  =================
 wavelength          [m]
 gamma               [rad / s]
 density             [m**-3]
 length              [m]
 n_s, n_c            [-]
 omega_ratio         [-]   (w_es / w_eg)
 k0, delta_k         [1 / m]
 sigma               [m**2]
 xi                  [1 / s]
 g2n                 [rad**2 / s**2]
 control intensity   [rad**2 / s**2]  (|Omega|**2)
==================  =================

The collective coupling g^2 N is tied to the atomic density through
``g2n = (sigma / 2) * density * gamma * c`` so that the optical depth is
``d0 = xi * L / c = density * sigma * L / 2``. This is the only place the
convention appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import PhasematchingError, UndefinedCoefficientsError

C_LIGHT = 299792458.0


@dataclass(frozen=True)
class MediumParams:
    wavelength: float
    gamma: float
    density: float
    length: float
    n_s: float = 1.0
    n_c: float = 1.0
    omega_ratio: float = 1.0

    def __post_init__(self):
        for name in ("wavelength", "gamma", "density", "length", "omega_ratio"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.n_s < 1 or self.n_c < 1:
            raise ValueError("background indices must be >= 1")


@dataclass(frozen=True)
class DerivedParams:
    k0: float
    delta_k: float
    sigma: float
    xi: float
    d0: float
    g2n: float
    gamma: float
    length: float
    wavelength: float
    density: float


def cross_section(wavelength: float) -> float:
    """Resonant scattering cross-section ``3 lambda^2 / (4 pi)``."""
    return 3.0 * wavelength**2 / (4.0 * np.pi)


def collective_coupling(sigma: float, density: float, gamma: float) -> float:
    """g^2 N in rad^2/s^2 from the cross-section convention."""
    return 0.5 * sigma * density * gamma * C_LIGHT


def derive(params: MediumParams) -> DerivedParams:
    """Compute k0, the wavevector mismatch, xi, d0 and g^2 N.

    Raises
    ------
    PhasematchingError
        If ``delta_k <= 0``; the guided stationary mode needs positive mismatch.
    """
    k0 = 2.0 * np.pi / params.wavelength
    delta_k = k0 * (params.n_s - params.n_c * params.omega_ratio)
    if not delta_k > 0:
        raise PhasematchingError(
            f"wavevector mismatch delta_k = {delta_k:.3e} 1/m is not positive "
            f"(n_s={params.n_s}, n_c={params.n_c}, omega_ratio={params.omega_ratio})"
        )
    sigma = cross_section(params.wavelength)
    g2n = collective_coupling(sigma, params.density, params.gamma)
    xi = g2n / params.gamma
    d0 = xi * params.length / C_LIGHT
    return DerivedParams(
        k0=k0,
        delta_k=delta_k,
        sigma=sigma,
        xi=xi,
        d0=d0,
        g2n=g2n,
        gamma=params.gamma,
        length=params.length,
        wavelength=params.wavelength,
        density=params.density,
    )


@dataclass(frozen=True)
class SlowLightCoefficients:
    alpha_plus: float
    alpha_minus: float
    eta: float
    v_g: float

    @property
    def imbalance(self) -> float:
        return self.alpha_plus - self.alpha_minus


def slow_light(drive_sample: Tuple[float, float], derived: DerivedParams) -> SlowLightCoefficients:
    """Mixing fractions, eta and group velocity for one drive sample.

    ``drive_sample`` is ``(|Omega_+|^2, |Omega_-|^2)``.
    """
    ip, im = (float(x) for x in drive_sample)
    if ip < 0 or im < 0:
        raise ValueError("control intensities must be nonnegative")
    total = ip + im
    if not total > 0:
        raise UndefinedCoefficientsError("both control intensities are zero")
    alpha_plus = ip / total
    # keeps alpha_plus + alpha_minus == 1 exactly in floating point
    alpha_minus = 1.0 - alpha_plus
    eta = derived.g2n / total
    v_g = C_LIGHT * (alpha_plus - alpha_minus) / eta
    return SlowLightCoefficients(alpha_plus, alpha_minus, eta, v_g)


def intensity_for(eta: float, imbalance: float, derived: DerivedParams) -> Tuple[float, float]:
    """Inverse of :func:`slow_light`: drive sample giving ``eta`` and ``alpha_+ - alpha_-``."""
    if not -1 <= imbalance <= 1:
        raise ValueError("imbalance must lie in [-1, 1]")
    total = derived.g2n / eta
    return 0.5 * (1 + imbalance) * total, 0.5 * (1 - imbalance) * total


PROFILES = ("gaussian", "bessel")


@dataclass(frozen=True)
class ControlDrive:
    """Counter-propagating control intensities as piecewise-linear schedules.

    ``times``, ``plus`` and ``minus`` are breakpoints of |Omega_+|^2 and
    |Omega_-|^2. Outside the breakpoint range the end values are held.
    For a Bessel profile ``a`` is the radius of the first lobe.
    """

    times: Tuple[float, ...]
    plus: Tuple[float, ...]
    minus: Tuple[float, ...]
    profile: str = "gaussian"
    a: float = 100e-6

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "plus", tuple(float(x) for x in self.plus))
        object.__setattr__(self, "minus", tuple(float(x) for x in self.minus))
        n = len(self.times)
        if n == 0 or len(self.plus) != n or len(self.minus) != n:
            raise ValueError("schedule breakpoints must be non-empty and equally long")
        if any(t2 < t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("schedule times must be nondecreasing")
        if min(self.plus) < 0 or min(self.minus) < 0:
            raise ValueError("control intensities must be nonnegative")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}, got {self.profile!r}")
        if not self.a > 0:
            raise ValueError("beam radius a must be positive")

    @classmethod
    def constant(cls, plus: float, minus: float, **kw) -> "ControlDrive":
        return cls((0.0,), (plus,), (minus,), **kw)

    def sample(self, t: float) -> Tuple[float, float]:
        if len(self.times) == 1:
            return self.plus[0], self.minus[0]
        return (
            float(np.interp(t, self.times, self.plus)),
            float(np.interp(t, self.times, self.minus)),
        )

    @property
    def t_end(self) -> float:
        return self.times[-1]
