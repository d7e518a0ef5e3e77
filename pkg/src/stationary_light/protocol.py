"""
Kerr-type phase shift between a dragged stationary probe and a stored spin wave.

Sequence: a signal pulse is stored in S, a Raman pi pulse moves it to S',
a probe is stored in S, balanced counter-propagating control beams turn it
into a stationary pulse, a small drive imbalance drags it through S', and
it is retrieved. The probe picks up a phase proportional to the number of
excitations in S'.

Conventions
-----------
* Spin envelopes are normalized to the medium length ``L``: an envelope
  holding ``N`` excitations has ``(1/L) * integral |S'|^2 dz = N``, so
  ``n1 = |S'|^2`` is the dimensionless occupation per quantization length.
* The quantization area equals the mode area ``pi R^2``, so ``g_tilde = g``
  and ``g^2 = g^2 N / (density * pi R^2 * L)``.
* ``beta_kerr`` (per-excitation light shift) is unrelated to the
  longitudinal wavevector ``beta_wave`` of :mod:`stationary_light.modes`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import erf

from .errors import InfiniteTimeError
from .medium import C_LIGHT, DerivedParams, slow_light
from .propagator import Grid, PolaritonState, StepReport, _safe_measure, step

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KerrParams:
    Delta: float
    gamma: float
    g_tilde2: float
    mode_area: float
    include_loss: bool = True

    @property
    def beta_kerr(self) -> complex:
        return self.g_tilde2 / self.Delta * (1.0 + 1j * self.gamma / self.Delta)

    @property
    def effective_beta(self) -> complex:
        """Coefficient used by the propagator; imaginary part dropped when loss is off."""
        b = self.beta_kerr
        return b if self.include_loss else complex(b.real, 0.0)

    @property
    def mode_radius(self) -> float:
        return float(np.sqrt(self.mode_area / np.pi))


def kerr_params(derived: DerivedParams, mode_radius: float, delta_over_gamma: float,
                include_loss: bool = True) -> KerrParams:
    area = np.pi * mode_radius**2
    atoms = derived.density * area * derived.length
    g2 = derived.g2n / atoms
    return KerrParams(
        Delta=delta_over_gamma * derived.gamma,
        gamma=derived.gamma,
        g_tilde2=g2,
        mode_area=area,
        include_loss=include_loss,
    )


# ---------------------------------------------------------------------------
# stored envelopes


@dataclass(frozen=True)
class GaussianEnvelope:
    """``A exp(-((z - center)/width)^2)`` holding ``number`` excitations."""

    center: float
    width: float
    number: float
    length: float

    @property
    def peak_density(self) -> float:
        return self.number * self.length / (self.width * np.sqrt(np.pi / 2))

    def amplitude(self, z):
        return np.sqrt(self.peak_density) * np.exp(-(((np.asarray(z) - self.center) / self.width) ** 2))

    def cumulative(self, z):
        """Antiderivative of ``|amplitude|^2`` from minus infinity."""
        x = np.sqrt(2.0) * (np.asarray(z) - self.center) / self.width
        return 0.5 * self.number * self.length * (1.0 + erf(x))


@dataclass(frozen=True)
class FlatTopEnvelope:
    """Uniform density over ``[center - span/2, center + span/2]`` with tanh edges of scale ``edge``."""

    center: float
    span: float
    number: float
    length: float
    edge: float

    @property
    def peak_density(self) -> float:
        return self.number * self.length / self.span

    def _edges(self, z):
        z = np.asarray(z, dtype=float)
        return (z - (self.center - 0.5 * self.span)) / self.edge, (z - (self.center + 0.5 * self.span)) / self.edge

    def density(self, z):
        a, b = self._edges(z)
        return 0.5 * self.peak_density * (np.tanh(a) - np.tanh(b))

    def amplitude(self, z):
        return np.sqrt(np.clip(self.density(z), 0.0, None))

    def cumulative(self, z):
        a, b = self._edges(z)
        # log cosh a - log cosh b, overflow-safe
        lc = lambda x: np.logaddexp(x, -x)
        return 0.5 * self.peak_density * self.edge * (lc(a) - lc(b) + self.span / self.edge)


Envelope = Union[GaussianEnvelope, FlatTopEnvelope]


@dataclass(frozen=True)
class StoredExcitation:
    envelope: np.ndarray
    N_Sprime: float
    l_sprime: float


def stored_excitation(envelope: Envelope, grid: Grid) -> StoredExcitation:
    values = np.asarray(envelope.amplitude(grid.z), dtype=complex)
    number = float(np.sum(np.abs(values) ** 2) * grid.dz / envelope.length)
    span = getattr(envelope, "span", None) or getattr(envelope, "width")
    return StoredExcitation(values, number, float(span))


# ---------------------------------------------------------------------------
# closed forms


def analytic_solution(S0: Envelope, Sprime0: Envelope, z, t: float, v_g: float, eta: float,
                      beta: complex, probe_phase: float = 0.0):
    """Spreading-free solutions for the dragged probe S and the stored S'.

    ``S(z,t) = exp[i beta/(eta v) * int_{z-vt}^{z} n1] S(z - vt, 0)`` and
    ``S'(z,t) = exp[i beta/(eta v) * int_{z-vt}^{z} n2(., 0)] S'(z, 0)``.
    The integrals use the envelopes' closed-form antiderivatives. Valid for
    static densities, i.e. real ``beta``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    z = np.asarray(z, dtype=float)
    if v_g == 0:
        raise InfiniteTimeError("analytic solution needs a moving probe (v_g != 0)")
    shift = v_g * t
    rate = beta / (eta * v_g)
    phase_S = rate * (Sprime0.cumulative(z) - Sprime0.cumulative(z - shift))
    phase_Sp = rate * (S0.cumulative(z) - S0.cumulative(z - shift))
    S = np.exp(1j * phase_S) * S0.amplitude(z - shift) * np.exp(1j * probe_phase)
    Sp = np.exp(1j * phase_Sp) * Sprime0.amplitude(z)
    return S, Sp


def phase_shift_formula(kerr: KerrParams, length: float, N_Sprime: float, v_g: float, eta: float) -> float:
    """Phase after full traversal, ``Re(beta) L N / (eta v_g)``.

    Inversely proportional to v_g: a slower drag means a longer interaction.
    """
    if v_g == 0:
        raise InfiniteTimeError("v_g = 0: the drag never completes")
    if v_g < 0:
        raise ValueError("v_g must be positive")
    return float(kerr.beta_kerr.real * length * N_Sprime / (eta * v_g))


def phase_bound(kerr: KerrParams, sigma: float, d0: float, l_s: float, l_sprime: float, length: float) -> float:
    """Upper estimate ``d0 (gamma/Delta) (sigma / pi R^2) l_s^2 / (L l_s')``.

    Linear in d0; two co-propagating slow pulses only reach sqrt(d0).
    """
    if min(l_s, l_sprime, length) <= 0:
        raise ValueError("lengths must be positive")
    if not l_sprime <= l_s <= length:
        raise ValueError("need l_sprime <= l_s <= L")
    return float(d0 * (kerr.gamma / kerr.Delta) * (sigma / kerr.mode_area) * l_s**2 / (length * l_sprime))


def loss_probability(phi: float, kerr: KerrParams) -> float:
    """Two-photon loss ``1 - exp(-2 phi gamma / Delta)`` implied by Im(beta)/Re(beta)."""
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    return float(-np.expm1(-2.0 * phi * kerr.gamma / kerr.Delta))


# ---------------------------------------------------------------------------
# protocol plan


@dataclass(frozen=True)
class StorePulse:
    """Write an envelope into S. ``role`` is "signal" or "probe"."""

    role: str
    envelope: Envelope


@dataclass(frozen=True)
class RamanPi:
    """Instantaneous lossless swap of S and S'."""


@dataclass(frozen=True)
class RampDrive:
    plus: float
    minus: float
    duration: float = 0.0


@dataclass(frozen=True)
class Hold:
    duration: float


@dataclass(frozen=True)
class Retrieve:
    direction: str
    duration: float


Event = Union[StorePulse, RamanPi, RampDrive, Hold, Retrieve]


@dataclass(frozen=True)
class ProtocolPlan:
    events: Tuple[Event, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        kinds = [type(e).__name__ if not isinstance(e, StorePulse) else e.role for e in self.events]
        if kinds.count("signal") != 1 or kinds.count("probe") != 1:
            raise ValueError("plan needs exactly one signal and one probe StorePulse")
        i_sig, i_probe = kinds.index("signal"), kinds.index("probe")
        if not i_sig < i_probe or kinds[i_sig:i_probe].count("RamanPi") != 1:
            raise ValueError("exactly one RamanPi must sit between signal storage and probe injection")
        if kinds.count("RamanPi") != 1:
            raise ValueError("plan must contain exactly one RamanPi")
        for e in self.events:
            if isinstance(e, Retrieve) and e.direction not in ("forward", "backward"):
                raise ValueError("retrieve direction must be 'forward' or 'backward'")

    @property
    def probe(self) -> Envelope:
        return next(e.envelope for e in self.events if isinstance(e, StorePulse) and e.role == "probe")

    @property
    def signal(self) -> Envelope:
        return next(e.envelope for e in self.events if isinstance(e, StorePulse) and e.role == "signal")

    def with_signal_number(self, number: float) -> "ProtocolPlan":
        events = []
        for e in self.events:
            if isinstance(e, StorePulse) and e.role == "signal":
                e = StorePulse("signal", _replace_number(e.envelope, number))
            events.append(e)
        return ProtocolPlan(tuple(events))


def _replace_number(env: Envelope, number: float) -> Envelope:
    from dataclasses import replace

    return replace(env, number=number)


@dataclass(frozen=True)
class DragDesign:
    """Geometry and drive of the default drag."""

    probe_start: float
    travel: float
    imbalance: float
    eta: float
    duration: float
    v_g: float


def design_drag(derived: DerivedParams, grid: Grid, l_s: float, l_sprime: float,
                eta: float, drag_vg: Optional[float] = None, travel_factor: float = 1.5) -> DragDesign:
    """Choose start point, travel and imbalance of the drag.

    The probe centroid travels ``travel_factor * l_s'`` centred on S'; the
    default 1.5 leaves a quarter of ``l_s'`` clear on each side. With ``drag_vg=None`` the speed is the slowest one for
    which the spreading term stays adiabatic over the drag:
    ``(c/l_s)^2 t / (eta xi) = 1``.
    """
    center = grid.medium_offset(derived.length) + 0.5 * derived.length
    travel = travel_factor * l_sprime
    if drag_vg is None:
        drag_vg = C_LIGHT**2 * travel / (l_s**2 * eta * derived.xi)
    if not drag_vg > 0:
        raise InfiniteTimeError("drag group velocity must be positive")
    imbalance = drag_vg * eta / C_LIGHT
    if imbalance >= 1:
        raise ValueError(f"drag v_g {drag_vg:.3e} m/s exceeds c/eta at eta={eta:.3e}")
    return DragDesign(
        probe_start=center - 0.5 * travel,
        travel=travel,
        imbalance=imbalance,
        eta=eta,
        duration=travel / drag_vg,
        v_g=drag_vg,
    )


def default_plan(derived: DerivedParams, grid: Grid, l_s: float, l_sprime: float, N_Sprime: float,
                 eta: float, drag_vg: Optional[float] = None, retrieve_fraction: float = 0.0,
                 edge_fraction: float = 1 / 20, travel_factor: float = 1.5) -> Tuple[ProtocolPlan, DragDesign]:
    """Store signal, Raman pi, store probe, balance, drag, retrieve forward."""
    design = design_drag(derived, grid, l_s, l_sprime, eta, drag_vg, travel_factor)
    center = grid.medium_offset(derived.length) + 0.5 * derived.length
    signal = FlatTopEnvelope(center, l_sprime, N_Sprime, derived.length, edge_fraction * l_sprime)
    probe = GaussianEnvelope(design.probe_start, l_s, 1.0, derived.length)
    total = derived.g2n / eta
    plus = 0.5 * (1 + design.imbalance) * total
    minus = 0.5 * (1 - design.imbalance) * total
    retrieve_time = retrieve_fraction * l_s / (C_LIGHT / eta)
    events = (
        StorePulse("signal", signal),
        RamanPi(),
        StorePulse("probe", probe),
        RampDrive(0.5 * total, 0.5 * total),
        RampDrive(plus, minus),
        Hold(design.duration),
        Retrieve("forward", retrieve_time),
    )
    return ProtocolPlan(events), design


@dataclass
class PhaseShiftReport:
    phi_numeric: float
    phi_analytic: float
    phi_bound: float
    loss_probability: float
    warnings: List[str] = field(default_factory=list)

    def to_json_dict(self, config_echo=None) -> dict:
        return {
            "phi_numeric_rad": self.phi_numeric,
            "phi_analytic_rad": self.phi_analytic,
            "phi_bound_rad": self.phi_bound,
            "loss_probability": self.loss_probability,
            "warnings": list(self.warnings),
            "config_echo": config_echo,
        }


@dataclass
class ProtocolRun:
    report: PhaseShiftReport
    trajectory: List[Tuple[float, StepReport]]
    final_state: PolaritonState
    phase_history: List[Tuple[float, float]]
    number_history: List[Tuple[float, float, float]]


def _segment_steps(duration: float, dt: float) -> List[float]:
    if duration <= 0:
        return []
    n = int(np.ceil(duration / dt - 1e-9))
    return [duration / n] * n


def _path_phase(beta_real: float, env: Envelope, z0: float, drift: float, dress: float, h: float) -> float:
    """Kerr phase picked up by a parcel moving from ``z0`` at ``drift`` for ``h``."""
    if drift != 0:
        swept = env.cumulative(z0 + drift * h) - env.cumulative(z0)
        return float(beta_real / (dress * drift) * swept)
    return float(beta_real / dress * _density(env, z0) * h)


def _density(env: Envelope, z) -> float:
    if isinstance(env, FlatTopEnvelope):
        return float(env.density(z))
    return float(np.abs(env.amplitude(z)) ** 2)


def execute(
    plan: ProtocolPlan,
    derived: DerivedParams,
    grid: Grid,
    kerr: KerrParams,
    l_s: float,
    l_sprime: float,
    spreading: bool = True,
    report_stride: int = 10,
) -> ProtocolRun:
    """Run the plan on the propagator and measure the differential probe phase.

    The plan is run twice in lockstep, the second time with the stored signal
    emptied. The phase of ``psi_+ + psi_-`` relative to the reference,
    interpolated to the reference centroid, is unwrapped along the run. ``phi_analytic``
    integrates the stored density along the spreading-free path of that
    centroid, which is the closed-form solution evaluated there.
    """
    zeros = np.zeros(grid.nz, dtype=complex)
    states = [PolaritonState.from_spin(zeros), PolaritonState.from_spin(zeros)]
    signal_env = plan.signal
    beta_real = kerr.effective_beta.real
    intensities = (0.0, 0.0)
    t = 0.0
    n_steps = 0
    phase = 0.0
    analytic_phase = 0.0
    adiabatic = 0.0
    trajectory: List[Tuple[float, StepReport]] = []
    phase_history: List[Tuple[float, float]] = []
    number_history: List[Tuple[float, float, float]] = []

    def record():
        nonlocal phase
        ref = _safe_measure(states[1], grid)
        trajectory.append((t, _safe_measure(states[0], grid)))
        # differential phasor, linearly interpolated to the centroid
        x = ref.centroid / grid.dz
        lo = int(np.clip(np.floor(x), 0, grid.nz - 2))
        w = float(np.clip(x - lo, 0.0, 1.0))
        a = states[0].psi_plus[lo:lo + 2] + states[0].psi_minus[lo:lo + 2]
        b = states[1].psi_plus[lo:lo + 2] + states[1].psi_minus[lo:lo + 2]
        pair = a * np.conj(b)
        phasor = (1 - w) * pair[0] + w * pair[1]
        if abs(phasor) > 0:
            raw = float(np.angle(phasor))
            phase = raw + 2 * np.pi * np.round((phase - raw) / (2 * np.pi))
        phase_history.append((t, phase))
        s0 = states[0]
        number_history.append((
            t,
            float(np.sum(np.abs(s0.spin_S) ** 2) * grid.dz / derived.length),
            float(np.sum(np.abs(s0.spin_Sprime) ** 2) * grid.dz / derived.length),
        ))

    def advance(duration, start, end):
        nonlocal t, n_steps, analytic_phase, adiabatic
        t0 = t
        for h in _segment_steps(duration, grid.dt):
            frac = (t + 0.5 * h - t0) / duration
            ip = start[0] + (end[0] - start[0]) * frac
            im = start[1] + (end[1] - start[1]) * frac
            coeffs = slow_light((ip, im), derived) if ip + im > 0 else None
            if coeffs is not None:
                dress = 1.0 + coeffs.eta
                drift = C_LIGHT * coeffs.imbalance / dress
                z0 = _safe_measure(states[1], grid).centroid
                analytic_phase += _path_phase(beta_real, signal_env, z0, drift, dress, h)
                adiabatic += (C_LIGHT / l_s) ** 2 * h / (coeffs.eta * derived.xi)
            states[0] = step(states[0], coeffs, derived, grid, dt=h, kerr=kerr, spreading=spreading)
            states[1] = step(states[1], coeffs, derived, grid, dt=h, kerr=kerr, spreading=spreading)
            t += h
            n_steps += 1
            if n_steps % report_stride == 0:
                record()

    record()
    for event in plan.events:
        if isinstance(event, StorePulse):
            amp = np.asarray(event.envelope.amplitude(grid.z), dtype=complex)
            added = (amp, zeros) if event.role == "signal" else (amp, amp)
            for i in range(2):
                s = states[i]
                states[i] = PolaritonState.from_spin(s.spin_S + added[i], s.spin_Sprime, t)
        elif isinstance(event, RamanPi):
            for i in range(2):
                s = states[i]
                states[i] = PolaritonState.from_spin(s.spin_Sprime, s.spin_S, t)
        elif isinstance(event, RampDrive):
            target = (event.plus, event.minus)
            advance(event.duration, intensities, target)
            intensities = target
        elif isinstance(event, Hold):
            advance(event.duration, intensities, intensities)
        elif isinstance(event, Retrieve):
            total = intensities[0] + intensities[1]
            intensities = (total, 0.0) if event.direction == "forward" else (0.0, total)
            advance(event.duration, intensities, intensities)
    record()

    warn: List[str] = []
    # the default drag sits exactly at the limit; ignore round-off
    if adiabatic > 1.0 + 1e-9:
        msg = (f"non-adiabatic drag: (c/l_s)^2 t/(eta xi) = {adiabatic:.3g} > 1; "
               "pulse spreading is not small")
        warn.append(msg)
        log.warning(msg)

    report = PhaseShiftReport(
        phi_numeric=float(phase),
        phi_analytic=float(analytic_phase),
        phi_bound=phase_bound(kerr, derived.sigma, derived.d0, l_s, l_sprime, derived.length),
        loss_probability=loss_probability(abs(float(phase)), kerr),
        warnings=warn,
    )
    return ProtocolRun(report, trajectory, states[0], phase_history, number_history)
