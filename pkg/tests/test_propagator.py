import numpy as np
import pytest
from hypothesis import given, strategies as st

from stationary_light.errors import SolverError, UndefinedMomentsError
from stationary_light.medium import C_LIGHT, ControlDrive, intensity_for, slow_light
from stationary_light.propagator import (
    TRAJECTORY_COLUMNS,
    Grid,
    PolaritonState,
    gaussian_pulse,
    measure,
    read_snapshot,
    run,
    step,
    write_snapshot,
    write_trajectory_csv,
)

ETA = 2e7


class Kerr:
    def __init__(self, beta):
        self.effective_beta = beta


def drive_for(derived, imbalance):
    return ControlDrive.constant(*intensity_for(ETA, imbalance, derived))


def pulse_state(grid, center, width, amplitude=1.0):
    return PolaritonState.from_spin(-gaussian_pulse(grid, center, width, amplitude))


class TestMeasure:
    def test_symmetric_gaussian(self):
        grid = Grid(512, 1e-3, 1.0)
        rep = measure(pulse_state(grid, 0.5e-3, 50e-6), grid)
        assert rep.centroid == pytest.approx(0.5e-3, rel=1e-12)
        assert rep.matching_residual == 0.0

    def test_backward_field_empty(self):
        grid = Grid(256, 1e-3, 1.0)
        psi = gaussian_pulse(grid, 0.5e-3, 50e-6)
        zero = np.zeros_like(psi)
        assert measure(PolaritonState(psi, zero, zero, zero), grid).matching_residual == 1.0

    @pytest.mark.parametrize("w", [20e-6, 50e-6, 120e-6])
    def test_gaussian_width_convention(self, w):
        grid = Grid(2048, 2e-3, 1.0)
        rep = measure(pulse_state(grid, 1e-3, w), grid)
        assert rep.rms_width == pytest.approx(w / np.sqrt(2), rel=1e-9)

    def test_zero_norm(self):
        grid = Grid(64, 1e-3, 1.0)
        with pytest.raises(UndefinedMomentsError):
            measure(PolaritonState.from_spin(np.zeros(64)), grid)

    @given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                    min_size=16, max_size=16),
           st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                    min_size=16, max_size=16))
    def test_residual_range(self, a, b):
        a, b = np.array(a), np.array(b)
        if not (np.any(a) or np.any(b)):
            return
        grid = Grid(16, 1.0, 1.0)
        z = np.zeros(16, complex)
        r = measure(PolaritonState(a, b, z, z), grid).matching_residual
        assert 0.0 <= r <= 2.0 + 1e-12


class TestLinearDynamics:
    def test_single_beam_translation(self, derived):
        grid = Grid(512, 1.5e-3, 1e-6)
        drive = ControlDrive.constant(*intensity_for(ETA, 1.0, derived))
        start = pulse_state(grid, 0.4e-3, 60e-6)
        t_end = 4e-5
        final, traj = run(start, drive, derived, grid, t_end)
        v = C_LIGHT / (1 + ETA)
        # the first step settles psi_- to its slaved value, shifting the centroid by ~c/xi once
        travel = traj[-1][1].centroid - traj[1][1].centroid
        assert travel == pytest.approx(v * (t_end - traj[1][0]), rel=1e-6)
        assert traj[-1][1].rms_width == pytest.approx(traj[1][1].rms_width, rel=1e-6)
        expected = pulse_state(grid, 0.4e-3 + v * t_end, 60e-6)
        assert np.max(np.abs(final.spin_S - expected.spin_S)) < 1e-9

    def test_pulse_matching_relaxes(self, derived):
        width = 200e-6
        grid = Grid(512, 2e-3, 1e-15)
        psi = gaussian_pulse(grid, 1e-3, width)
        zero = np.zeros_like(psi)
        state = PolaritonState(psi, zero, -0.5 * psi, zero.copy())
        t_end = 2e-14
        _, traj = run(state, drive_for(derived, 0.0), derived, grid, t_end)
        assert derived.xi * t_end > 20
        assert C_LIGHT * t_end < 0.05 * width
        assert traj[0][1].matching_residual == 1.0
        # steady level is set by the gradient, ~ 2c/(xi width)
        assert traj[-1][1].matching_residual < 0.01

    def test_spin_wave_bound_to_fields(self, derived):
        grid = Grid(256, 1e-3, 1e-5)
        coeffs = slow_light(intensity_for(ETA, 0.3, derived), derived)
        s = step(pulse_state(grid, 0.5e-3, 50e-6), coeffs, derived, grid)
        u = coeffs.alpha_plus * s.psi_plus + coeffs.alpha_minus * s.psi_minus
        assert np.allclose(s.spin_S, -u, atol=1e-15)

    def test_controls_off_freezes_state(self, derived):
        grid = Grid(128, 1e-3, 1e-5)
        start = pulse_state(grid, 0.5e-3, 50e-6)
        s = step(start, None, derived, grid)
        assert np.array_equal(s.psi_plus, start.psi_plus) and s.t == pytest.approx(1e-5)

    def test_width_growth_rate(self, derived):
        grid = Grid(512, 1.2e-3, 1.0)
        D = C_LIGHT**2 / ((1 + ETA) * derived.xi)
        t_end = (50e-6) ** 2 / D
        grid = Grid(512, 1.2e-3, t_end / 100)
        _, traj = run(pulse_state(grid, 0.6e-3, 50e-6), drive_for(derived, 0.0), derived, grid, t_end)
        t = np.array([x[0] for x in traj])
        w2 = np.array([x[1].rms_width for x in traj]) ** 2
        assert np.polyfit(t, w2, 1)[0] == pytest.approx(2 * D, rel=0.02)

    def test_stationary_centroid(self, derived):
        width = 50e-6
        t_spread = ETA * derived.xi * width**2 / C_LIGHT**2
        grid = Grid(512, 1.2e-3, t_spread / 100)
        _, traj = run(pulse_state(grid, 0.6e-3, width), drive_for(derived, 0.0), derived, grid, t_spread)
        drift = max(abs(r.centroid - 0.6e-3) for _, r in traj)
        assert drift < 0.01 * width

    def test_drive_switch_sets_velocity(self, derived):
        balanced = intensity_for(ETA, 0.0, derived)
        moving = intensity_for(ETA, 0.1, derived)
        t_switch, t_end = 1e-4, 4e-4
        drive = ControlDrive((0.0, t_switch, t_switch), (balanced[0], balanced[0], moving[0]),
                             (balanced[1], balanced[1], moving[1]))
        grid = Grid(512, 1.5e-3, 2e-6)
        _, traj = run(pulse_state(grid, 0.4e-3, 60e-6), drive, derived, grid, t_end)
        t = np.array([x[0] for x in traj])
        z = np.array([x[1].centroid for x in traj])
        before = t <= t_switch
        after = t >= t_switch + 2e-5
        assert abs(np.polyfit(t[before], z[before], 1)[0]) < 1e-3 * C_LIGHT * 0.1 / ETA
        assert np.polyfit(t[after], z[after], 1)[0] == pytest.approx(C_LIGHT * 0.1 / ETA, rel=0.02)

    def test_zero_field_trajectory(self, derived):
        grid = Grid(128, 1e-3, 1e-5)
        _, traj = run(PolaritonState.from_spin(np.zeros(128)), drive_for(derived, 0.2), derived, grid, 1e-4)
        assert len(traj) == 11
        assert all(r.norm == 0 and r.centroid == 0 and r.rms_width == 0 for _, r in traj)

    def test_symmetric_component_conserved(self, derived):
        # the xi coupling only damps psi_+ - psi_-; the integral of u is its zero mode
        grid = Grid(256, 1e-3, 1e-8)
        coeffs = slow_light(intensity_for(ETA, 0.0, derived), derived)
        psi = gaussian_pulse(grid, 0.5e-3, 60e-6)
        state = PolaritonState(psi, 0.3 * psi, -0.65 * psi, np.zeros_like(psi))
        kerr = Kerr(0.0 + 0.0j)
        u0 = np.sum(0.5 * (state.psi_plus + state.psi_minus))
        for _ in range(10_000):
            state = step(state, coeffs, derived, grid, kerr=kerr)
        u1 = np.sum(0.5 * (state.psi_plus + state.psi_minus))
        assert abs(u1 / u0 - 1) < 1e-6
        assert measure(state, grid).matching_residual < 0.01

    @given(st.floats(-1.0, 1.0), st.floats(-1e6, 1e6))
    def test_lossless_step_conserves_norm(self, derived, imbalance, beta):
        grid = Grid(256, 1e-3, 3e-6)
        coeffs = slow_light(intensity_for(ETA, imbalance, derived), derived)
        psi = gaussian_pulse(grid, 0.5e-3, 60e-6)
        state = PolaritonState.from_spin(-psi, 0.7 * gaussian_pulse(grid, 0.45e-3, 100e-6))
        before = measure(state, grid).norm
        after = measure(step(state, coeffs, derived, grid, kerr=Kerr(complex(beta, 0.0)), spreading=False),
                        grid).norm
        assert after == pytest.approx(before, rel=1e-10)

    def test_non_finite_state_aborts(self, derived):
        grid = Grid(64, 1e-3, 1e-5)
        bad = PolaritonState.from_spin(np.full(64, np.nan))
        coeffs = slow_light(intensity_for(ETA, 0.0, derived), derived)
        with pytest.raises(SolverError) as info:
            step(bad, coeffs, derived, grid)
        assert info.value.snapshot is bad

    def test_deterministic(self, derived):
        grid = Grid(256, 1e-3, 1e-5)
        a = run(pulse_state(grid, 0.5e-3, 60e-6), drive_for(derived, 0.1), derived, grid, 1e-4)[1]
        b = run(pulse_state(grid, 0.5e-3, 60e-6), drive_for(derived, 0.1), derived, grid, 1e-4)[1]
        assert a == b


class TestKerr:
    def test_uniform_density_phase(self, derived):
        grid = Grid(64, 1e-3, 1e-5)
        coeffs = slow_light(intensity_for(ETA, 0.0, derived), derived)
        n1, beta, T = 2.5, 3e5 + 0j, 1e-3
        state = PolaritonState.from_spin(np.ones(64), np.full(64, np.sqrt(n1)))
        for _ in range(100):
            state = step(state, coeffs, derived, grid, kerr=Kerr(beta))
        expected = beta.real * n1 * T / (1 + ETA)
        assert np.allclose(np.angle(-state.psi_plus), expected, atol=1e-12)
        # the dressed rate differs from beta/eta only at order 1/eta
        assert expected == pytest.approx(beta.real * n1 * T / ETA, rel=2 / ETA)

    def test_phase_additivity(self, derived):
        grid = Grid(64, 1e-3, 1e-5)
        coeffs = slow_light(intensity_for(ETA, 0.0, derived), derived)
        state = PolaritonState.from_spin(np.ones(64), np.full(64, 1.3))
        kerr = Kerr(4e5 + 0j)
        phases = []
        for _ in range(2):
            for _ in range(50):
                state = step(state, coeffs, derived, grid, kerr=kerr)
            phases.append(np.angle(-state.psi_plus[0]))
        assert phases[1] == pytest.approx(2 * phases[0], rel=1e-12)

    def test_stored_number_conserved(self, derived):
        grid = Grid(256, 1e-3, 1e-5)
        coeffs = slow_light(intensity_for(ETA, 0.2, derived), derived)
        sp = gaussian_pulse(grid, 0.5e-3, 40e-6, 2.0)
        state = PolaritonState.from_spin(-gaussian_pulse(grid, 0.3e-3, 80e-6), sp)
        n0 = np.sum(np.abs(state.spin_Sprime) ** 2)
        for _ in range(200):
            state = step(state, coeffs, derived, grid, kerr=Kerr(5e5 + 0j))
        assert np.sum(np.abs(state.spin_Sprime) ** 2) == pytest.approx(n0, rel=1e-12)

    def test_second_order_in_time(self, derived):
        imbalance = 0.2
        drive = drive_for(derived, imbalance)
        t_end = 1e-4
        base = Grid(256, 1e-3, 1.0)
        start = PolaritonState.from_spin(-gaussian_pulse(base, 0.4e-3, 60e-6),
                                         gaussian_pulse(base, 0.5e-3, 40e-6, 3.0))
        kerr = Kerr(2e9 + 0j)

        def final(n):
            grid = Grid(256, 1e-3, t_end / n)
            return run(start, drive, derived, grid, t_end, kerr=kerr, report_stride=n)[0].spin_S

        ref = final(1024)
        errors = [np.max(np.abs(final(n) - ref)) for n in (16, 32, 64)]
        ratios = [errors[0] / errors[1], errors[1] / errors[2]]
        assert all(3.0 < r < 5.0 for r in ratios), (errors, ratios)


def test_snapshot_round_trip(tmp_path):
    grid = Grid(32, 1e-3, 1e-5)
    rng = np.random.default_rng(7)
    fields = [rng.normal(size=32) + 1j * rng.normal(size=32) for _ in range(4)]
    state = PolaritonState(*fields, t=3.25e-4)
    path = tmp_path / "snap.bin"
    write_snapshot(path, state, grid)
    header = path.read_bytes().split(b"\n", 1)[0].decode()
    assert header.startswith("nz=32 ") and "t=" in header and "dz=" in header
    meta, arrays = read_snapshot(path)
    for name in ("psi_plus", "psi_minus", "spin_S", "spin_Sprime"):
        assert np.array_equal(arrays[name], getattr(state, name))
    assert meta["t"] == state.t and meta["nz"] == 32 and meta["dz"] == grid.dz


def test_snapshots_written_by_run(tmp_path, derived):
    grid = Grid(64, 1e-3, 1e-5)
    run(pulse_state(grid, 0.5e-3, 60e-6), drive_for(derived, 0.0), derived, grid, 1e-4,
        snapshot_stride=5, snapshot_dir=tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "snapshot_0000000.bin", "snapshot_0000005.bin", "snapshot_0000010.bin"]


def test_trajectory_csv(tmp_path, derived):
    grid = Grid(64, 1e-3, 1e-5)
    _, traj = run(pulse_state(grid, 0.5e-3, 60e-6), drive_for(derived, 0.1), derived, grid, 5e-5)
    path = tmp_path / "t.csv"
    write_trajectory_csv(path, traj)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
    assert len(lines) == len(traj) + 1
