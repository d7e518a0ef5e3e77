"""
Time-domain integrator for the coupled forward/backward polariton envelopes.

The field pair obeys

    (d_t + c d_z) psi_+ = -eta d_t u - a_- xi (psi_+ - psi_-) + i beta n1 psi_+
    (d_t - c d_z) psi_- = -eta d_t u + a_+ xi (psi_+ - psi_-) + i beta n1 psi_-

with ``u = a_+ psi_+ + a_- psi_-`` (minus the spin wave S) and ``n1 = |S'|^2``.
The ``eta d_t`` dressing is removed exactly by working with the dark
component ``u`` and the mismatch ``d = psi_+ - psi_-``:

    d_t u = -c/(1+eta) d_z[(a_+ - a_-) u + 2 a_+ a_- d] + i beta n1 u / (1+eta)
    d_t d = -c d_z[2 u - (a_+ - a_-) d] - xi d + i beta n1 d

The absorption coupling only damps ``d``. For spatially uniform drive the
linear part is a constant 2x2 system per Fourier mode and is advanced with
its exact matrix exponential, so ``xi dt`` may be arbitrarily large and there
is no CFL limit. The Kerr term is a diagonal phase rotation applied in real
space; the two are Strang-split (second order in dt) with the linear half
steps outside. ``d`` is slaved to ``u`` on the time scale ``1/xi``, far
shorter than its Kerr period, so closing each step with a linear half step
hands back ``d`` in its relaxed form.

Eliminating ``d`` for large ``xi`` gives drift ``c (a_+ - a_-)/(1+eta)`` and
diffusion ``4 a_+ a_- c^2 / ((1+eta) xi)``.

Snapshot file layout
--------------------
One ASCII header line ``nz=<int> dz=<float> t=<float> fields=psi_plus,psi_minus,spin_S,spin_Sprime``
terminated by ``\\n``, followed by the four fields in that order, each ``nz``
little-endian complex128 values (float64 real, float64 imaginary, interleaved).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import SolverError, UndefinedMomentsError
from .medium import C_LIGHT, ControlDrive, DerivedParams, SlowLightCoefficients, slow_light

log = logging.getLogger(__name__)

SNAPSHOT_FIELDS = ("psi_plus", "psi_minus", "spin_S", "spin_Sprime")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic z-grid of extent ``l_sim`` with ``nz`` cells.

    ``absorber`` is the fraction of the extent used at each end as an outflow
    layer; 0 gives a plain periodic domain.
    """

    nz: int
    l_sim: float
    dt: float
    absorber: float = 0.0

    def __post_init__(self):
        if self.nz < 2 or not self.l_sim > 0 or not self.dt > 0:
            raise ValueError("grid needs nz >= 2, l_sim > 0 and dt > 0")
        if not 0 <= self.absorber < 0.5:
            raise ValueError("absorber fraction must be in [0, 0.5)")

    @property
    def dz(self) -> float:
        return self.l_sim / self.nz

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.nz) * self.dz

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nz, d=self.dz)

    def medium_offset(self, length: float) -> float:
        """Left edge of a medium of ``length`` centred in the window."""
        return 0.5 * (self.l_sim - length)


@dataclass
class PolaritonState:
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    spin_S: np.ndarray
    spin_Sprime: np.ndarray
    t: float = 0.0

    @classmethod
    def from_spin(cls, spin_S, spin_Sprime=None, t: float = 0.0) -> "PolaritonState":
        """Pulse-matched state (psi_+ = psi_- = -S) holding the given spin waves."""
        S = np.asarray(spin_S, dtype=complex)
        Sp = np.zeros_like(S) if spin_Sprime is None else np.asarray(spin_Sprime, dtype=complex)
        return cls(-S.copy(), -S.copy(), S.copy(), Sp.copy(), t)

    def copy(self) -> "PolaritonState":
        return PolaritonState(self.psi_plus.copy(), self.psi_minus.copy(),
                              self.spin_S.copy(), self.spin_Sprime.copy(), self.t)


@dataclass(frozen=True)
class StepReport:
    centroid: float
    rms_width: float
    norm: float
    matching_residual: float
    centroid_phase: float


def gaussian_pulse(grid: Grid, center: float, width: float, amplitude: complex = 1.0) -> np.ndarray:
    """``amplitude * exp(-((z - center)/width)^2)`` on the grid."""
    return amplitude * np.exp(-(((grid.z - center) / width) ** 2)).astype(complex)


def _norm(x: np.ndarray, dz: float) -> float:
    return float(np.sqrt(np.sum(np.abs(x) ** 2) * dz))


def measure(state: PolaritonState, grid: Grid) -> StepReport:
    """Moments of ``|psi_+|^2 + |psi_-|^2``.

    ``rms_width`` is ``sqrt(2 var)``, the rms width of the amplitude envelope
    of a Gaussian: ``exp(-(z/w)^2)`` gives ``w / sqrt(2)``.
    """
    dz = grid.dz
    peak = float(max(np.max(np.abs(state.psi_plus)), np.max(np.abs(state.psi_minus))))
    if not peak > 0:
        raise UndefinedMomentsError("zero-norm state has no centroid or width")
    # moments on the peak-scaled fields so tiny amplitudes do not underflow when squared
    plus, minus = state.psi_plus / peak, state.psi_minus / peak
    intensity = np.abs(plus) ** 2 + np.abs(minus) ** 2
    total = float(np.sum(intensity))
    z = grid.z
    centroid = float(np.sum(z * intensity) / total)
    var = float(np.sum((z - centroid) ** 2 * intensity) / total)
    residual = _norm(plus - minus, dz) / max(_norm(plus, dz), _norm(minus, dz))
    cell = int(np.clip(np.rint(centroid / dz), 0, grid.nz - 1))
    phase = float(np.angle(state.psi_plus[cell] + state.psi_minus[cell]))
    return StepReport(
        centroid=centroid,
        rms_width=float(np.sqrt(2.0 * var)),
        norm=peak * float(np.sqrt(total * dz)),
        matching_residual=float(residual),
        centroid_phase=phase,
    )


ZERO_REPORT = StepReport(0.0, 0.0, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# linear part


def _pair_exponential(g11, g12, g21, g22, t):
    """Entrywise ``exp(t G)`` for a stack of 2x2 matrices.

    Uses ``exp(tG) = e^{l1 t} I + f (G - l1 I)`` with
    ``f = (e^{l2 t} - e^{l1 t}) / (l2 - l1)``, ``Re l1 >= Re l2``. The small
    eigenvalue is taken as ``det / l_big`` so it survives next to ``-xi``.
    """
    half_tr = 0.5 * (g11 + g22)
    det = g11 * g22 - g12 * g21
    s = np.sqrt(half_tr**2 - det)
    big = np.where(np.abs(half_tr + s) >= np.abs(half_tr - s), half_tr + s, half_tr - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, det / big, 0.0)
    swap = small.real < big.real
    l1 = np.where(swap, big, small)
    l2 = np.where(swap, small, big)
    x = (l2 - l1) * t
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(np.abs(x) < 1e-8, 1.0 + 0.5 * x, np.expm1(x) / x)
    e1 = np.exp(l1 * t)
    f = e1 * t * phi
    return e1 + f * (g11 - l1), f * g12, f * g21, e1 + f * (g22 - l1)


class LinearPropagator:
    """Exact one-step evolution of ``(u, d)`` in Fourier space for fixed coefficients."""

    def __init__(self, grid: Grid, coeffs: SlowLightCoefficients, derived: DerivedParams,
                 dt: float, spreading: bool = True):
        self.spreading = spreading
        k = grid.k
        c = C_LIGHT
        dress = 1.0 + coeffs.eta
        delta = coeffs.imbalance
        self.drift = c * delta / dress
        if not spreading:
            # xi -> infinity: d is slaved to zero, u is rigidly translated
            self.shift = np.exp(-1j * k * self.drift * dt)
            return
        ap, am = coeffs.alpha_plus, coeffs.alpha_minus
        g11 = -1j * k * c * delta / dress
        g12 = -1j * k * c * 2.0 * ap * am / dress
        g21 = -1j * k * c * 2.0
        g22 = 1j * k * c * delta - derived.xi
        self.e11, self.e12, self.e21, self.e22 = _pair_exponential(g11, g12, g21, g22, dt)

    def __call__(self, u: np.ndarray, d: np.ndarray):
        uk = np.fft.fft(u)
        if not self.spreading:
            return np.fft.ifft(self.shift * uk), np.zeros_like(d)
        dk = np.fft.fft(d)
        return (np.fft.ifft(self.e11 * uk + self.e12 * dk),
                np.fft.ifft(self.e21 * uk + self.e22 * dk))


_CACHE_SIZE = 8


class _PropagatorCache:
    def __init__(self):
        self._items = {}

    def get(self, grid, coeffs, derived, dt, spreading):
        key = (grid.nz, grid.l_sim, coeffs.alpha_plus, coeffs.eta, derived.xi, dt, spreading)
        prop = self._items.get(key)
        if prop is None:
            if len(self._items) >= _CACHE_SIZE:
                self._items.pop(next(iter(self._items)))
            prop = LinearPropagator(grid, coeffs, derived, dt, spreading)
            self._items[key] = prop
        return prop


_cache = _PropagatorCache()


def _absorber_mask(grid: Grid) -> Optional[np.ndarray]:
    if grid.absorber <= 0:
        return None
    width = grid.absorber * grid.l_sim
    z = grid.z
    depth = np.clip(np.maximum(width - z, z - (grid.l_sim - width)) / width, 0.0, 1.0)
    return np.exp(-0.05 * depth**2)


# ---------------------------------------------------------------------------
# stepping


def _kerr_rotate(u, d, sprime, beta, dress, dt):
    n1 = np.abs(sprime) ** 2
    n2 = np.abs(u) ** 2
    u = u * np.exp(1j * beta * n1 * dt / dress)
    d = d * np.exp(1j * beta * n1 * dt)
    sprime = sprime * np.exp(1j * beta * n2 * dt / dress)
    return u, d, sprime


def step(
    state: PolaritonState,
    coeffs: Optional[SlowLightCoefficients],
    derived: DerivedParams,
    grid: Grid,
    dt: Optional[float] = None,
    kerr=None,
    spreading: bool = True,
) -> PolaritonState:
    """Advance the state by one Strang-split step.

    ``coeffs`` are the slow-light coefficients at the step midpoint; ``None``
    means the control fields are off, the excitation is purely a spin wave
    and nothing evolves. ``kerr`` is any object with an ``effective_beta``
    attribute (see :class:`stationary_light.protocol.KerrParams`).
    ``spreading=False`` takes the ``xi -> infinity`` limit.
    """
    dt = grid.dt if dt is None else dt
    if coeffs is None:
        return replace(state.copy(), t=state.t + dt)

    ap, am = coeffs.alpha_plus, coeffs.alpha_minus
    u = ap * state.psi_plus + am * state.psi_minus
    d = state.psi_plus - state.psi_minus
    sprime = state.spin_Sprime
    dress = 1.0 + coeffs.eta

    beta = None if kerr is None else kerr.effective_beta
    if beta is None:
        u, d = _cache.get(grid, coeffs, derived, dt, spreading)(u, d)
    else:
        half = _cache.get(grid, coeffs, derived, 0.5 * dt, spreading)
        u, d = half(u, d)
        u, d, sprime = _kerr_rotate(u, d, sprime, beta, dress, dt)
        u, d = half(u, d)

    mask = _absorber_mask(grid)
    if mask is not None:
        u = u * mask
        d = d * mask

    psi_plus = u + am * d
    psi_minus = u - ap * d
    new = PolaritonState(psi_plus, psi_minus, -u, sprime, state.t + dt)
    if not (np.all(np.isfinite(psi_plus)) and np.all(np.isfinite(psi_minus))
            and np.all(np.isfinite(sprime))):
        raise SolverError(f"non-finite field at t={new.t:.6e} s", snapshot=state)
    return new


def coefficients_at(drive: ControlDrive, t: float, derived: DerivedParams) -> Optional[SlowLightCoefficients]:
    ip, im = drive.sample(t)
    if ip + im <= 0:
        return None
    return slow_light((ip, im), derived)


Observer = Callable[[float, PolaritonState], None]


def run(
    initial: PolaritonState,
    drive: ControlDrive,
    derived: DerivedParams,
    grid: Grid,
    t_end: float,
    kerr=None,
    report_stride: int = 1,
    observers: Iterable[Observer] = (),
    spreading: bool = True,
    snapshot_stride: int = 0,
    snapshot_dir: Optional[Path] = None,
):
    """Step from ``initial.t`` to ``t_end``; returns ``(final_state, [(t, StepReport)])``.

    The drive is sampled at each step midpoint. A report (and observer call)
    is emitted for the initial state and then every ``report_stride`` steps
    and at the end. Zero-norm states report all zeros.
    """
    observers = list(observers)
    n_steps = int(np.ceil((t_end - initial.t) / grid.dt - 1e-9))
    n_steps = max(n_steps, 0)
    state = initial
    trajectory: List[Tuple[float, StepReport]] = []

    def emit(i):
        trajectory.append((state.t, _safe_measure(state, grid)))
        for obs in observers:
            obs(state.t, state)
        if snapshot_stride and snapshot_dir is not None and i % snapshot_stride == 0:
            write_snapshot(Path(snapshot_dir) / f"snapshot_{i:07d}.bin", state, grid)

    emit(0)
    t0 = initial.t
    for i in range(1, n_steps + 1):
        t_start = t0 + (i - 1) * grid.dt
        dt = min(grid.dt, t_end - t_start)
        coeffs = coefficients_at(drive, t_start + 0.5 * dt, derived)
        state = step(state, coeffs, derived, grid, dt=dt, kerr=kerr, spreading=spreading)
        if i % report_stride == 0 or i == n_steps:
            emit(i)
    return state, trajectory


def _safe_measure(state: PolaritonState, grid: Grid) -> StepReport:
    try:
        return measure(state, grid)
    except UndefinedMomentsError:
        return ZERO_REPORT


# ---------------------------------------------------------------------------
# output

TRAJECTORY_COLUMNS = ("t_s", "centroid_m", "rms_width_m", "norm", "matching_residual", "phase_rad")


def write_trajectory_csv(path, trajectory: Sequence[Tuple[float, StepReport]]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for t, rep in trajectory:
            writer.writerow([repr(float(v)) for v in (t, rep.centroid, rep.rms_width, rep.norm,
                                                      rep.matching_residual, rep.centroid_phase)])


def write_snapshot(path, state: PolaritonState, grid: Grid) -> None:
    header = f"nz={grid.nz} dz={grid.dz!r} t={state.t!r} fields={','.join(SNAPSHOT_FIELDS)}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for name in SNAPSHOT_FIELDS:
            fh.write(np.asarray(getattr(state, name), dtype="<c16").tobytes())


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns ``(header_dict, {field: array})``."""
    with open(path, "rb") as fh:
        header_line = fh.readline().decode("ascii").strip()
        payload = fh.read()
    header = dict(item.split("=", 1) for item in header_line.split())
    nz = int(header["nz"])
    fields = header["fields"].split(",")
    data = np.frombuffer(payload, dtype="<c16")
    if data.size != nz * len(fields):
        raise ValueError(f"snapshot payload has {data.size} values, expected {nz * len(fields)}")
    arrays = {name: data[i * nz:(i + 1) * nz].copy() for i, name in enumerate(fields)}
    meta = {"nz": nz, "dz": float(header["dz"]), "t": float(header["t"]), "fields": fields}
    return meta, arrays
