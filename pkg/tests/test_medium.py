import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stationary_light.errors import PhasematchingError, UndefinedCoefficientsError
from stationary_light.medium import (
    C_LIGHT,
    ControlDrive,
    derive,
    intensity_for,
    slow_light,
)

intensities = st.floats(min_value=1e6, max_value=1e20, allow_nan=False)


def test_cross_section_at_800nm(derived):
    # 3 * (0.8e-6)^2 / (4 pi), by hand
    assert derived.sigma == pytest.approx(1.53e-13, rel=5e-3)
    assert derived.sigma == pytest.approx(3 * 0.64e-12 / (4 * math.pi), rel=1e-14)


def test_equal_indices_reject(medium):
    from dataclasses import replace

    with pytest.raises(PhasematchingError):
        derive(replace(medium, n_s=1.0, n_c=1.0))


def test_optical_depth_of_reference_slab(derived):
    # independent arithmetic: n sigma L / 2
    sigma = 3 * (0.8e-6) ** 2 / (4 * math.pi)
    expected = 1e20 * sigma * 300e-6 / 2
    assert derived.d0 == pytest.approx(expected, rel=1e-12)
    assert derived.d0 == pytest.approx(2.3e3, rel=0.01)
    assert derived.d0 == pytest.approx(derived.xi * derived.length / C_LIGHT, rel=1e-12)


def test_derived_definitions(derived):
    assert derived.k0 == pytest.approx(2 * math.pi / 0.8e-6)
    assert derived.delta_k == pytest.approx(0.012 * derived.k0)
    assert derived.xi == pytest.approx(derived.g2n / derived.gamma)
    assert derived.g2n == pytest.approx(4.35e22, rel=1e-3)


@pytest.mark.parametrize("field,value", [("wavelength", 0.0), ("gamma", -1.0), ("density", np.nan), ("n_s", 0.9)])
def test_medium_params_validate(medium, field, value):
    from dataclasses import replace

    with pytest.raises(ValueError):
        replace(medium, **{field: value})


def test_balanced_drive_is_stationary(derived):
    c = slow_light((2e14, 2e14), derived)
    assert (c.alpha_plus, c.alpha_minus, c.v_g) == (0.5, 0.5, 0.0)


def test_single_beam_limit(derived):
    c = slow_light((3e14, 0.0), derived)
    assert c.alpha_plus == 1.0
    assert c.v_g == pytest.approx(C_LIGHT / c.eta)


def test_three_to_one_drive(derived):
    c = slow_light((3e14, 1e14), derived)
    assert c.alpha_plus == 0.75 and c.alpha_minus == 0.25
    assert c.v_g == pytest.approx(C_LIGHT / (2 * c.eta))
    assert c.eta == pytest.approx(derived.g2n / 4e14)


def test_zero_drive_undefined(derived):
    with pytest.raises(UndefinedCoefficientsError):
        slow_light((0.0, 0.0), derived)


@given(intensities, intensities)
def test_mixing_fractions_sum_to_one(derived, ip, im):
    c = slow_light((ip, im), derived)
    assert c.alpha_plus + c.alpha_minus == 1.0
    assert 0 <= c.alpha_minus <= 1 and 0 <= c.alpha_plus <= 1


@given(intensities, intensities)
def test_group_velocity_antisymmetric(derived, ip, im):
    a = slow_light((ip, im), derived).v_g
    b = slow_light((im, ip), derived).v_g
    assert a == pytest.approx(-b, rel=1e-12, abs=1e-12 * abs(a) + 1e-300)


@given(st.floats(0.1, 10.0), st.sampled_from(["density", "length"]))
def test_optical_depth_linear_in_density_and_length(medium, derived, factor, name):
    from dataclasses import replace

    scaled = derive(replace(medium, **{name: getattr(medium, name) * factor}))
    assert scaled.d0 / derived.d0 == pytest.approx(factor, rel=1e-12)


@given(st.floats(0.5, 2.0))
def test_optical_depth_scales_with_wavelength_squared(medium, derived, factor):
    from dataclasses import replace

    scaled = derive(replace(medium, wavelength=medium.wavelength * factor))
    assert scaled.d0 / derived.d0 == pytest.approx(factor**2, rel=1e-12)


@given(st.floats(1e3, 1e9), st.floats(-1.0, 1.0))
def test_intensity_for_inverts_slow_light(derived, eta, imbalance):
    c = slow_light(intensity_for(eta, imbalance, derived), derived)
    assert c.eta == pytest.approx(eta, rel=1e-12)
    assert c.imbalance == pytest.approx(imbalance, abs=1e-12)


def test_control_drive_schedule():
    drive = ControlDrive((0.0, 1.0), (0.0, 2.0), (4.0, 2.0))
    assert drive.sample(0.5) == (1.0, 3.0)
    assert drive.sample(5.0) == (2.0, 2.0)
    assert drive.t_end == 1.0
    with pytest.raises(ValueError):
        ControlDrive((0.0,), (-1.0,), (1.0,))
    with pytest.raises(ValueError):
        ControlDrive.constant(1.0, 1.0, a=0.0)
    with pytest.raises(ValueError):
        ControlDrive.constant(1.0, 1.0, profile="tophat")
