import pytest
from hypothesis import given, strategies as st

from stationary_light.config import PRESETS, parse_config, parse_text, preset_text
from stationary_light.errors import ConfigError

BASE = preset_text("paper-guided-mode")


def edit(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_guided_mode_preset():
    cfg = parse_config("preset:paper-guided-mode")
    assert cfg.medium.wavelength == 0.8e-6
    assert cfg.medium.n_s - cfg.medium.n_c == pytest.approx(1.2e-2)
    assert cfg.drive.a == 100e-6
    assert cfg.medium.density == 1e20
    assert cfg.drive.profile == "gaussian"


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load_and_round_trip(name):
    cfg = parse_config(f"preset:{name}")
    assert parse_text(cfg.to_text()) == cfg


def test_bessel_preset():
    cfg = parse_config("preset:paper-bessel")
    assert cfg.drive.profile == "bessel" and cfg.drive.a == 20e-6


def test_empty_file_lists_sections(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    with pytest.raises(ConfigError) as info:
        parse_config(path)
    msg = str(info.value)
    for section in ("medium", "drive", "grid", "protocol", "output"):
        assert section in msg


def test_missing_unit():
    with pytest.raises(ConfigError) as info:
        parse_text(edit(BASE, "a = 100 um", "a = 100"))
    err = info.value
    assert "unit mismatch" in str(err)
    assert err.where == "drive.a"
    assert BASE.splitlines()[err.line - 1].startswith("a = 100 um")


def test_wrong_unit_family():
    with pytest.raises(ConfigError, match="unit mismatch"):
        parse_text(edit(BASE, "length = 300 um", "length = 300 s"))


def test_dimensionless_with_unit():
    with pytest.raises(ConfigError, match="unit mismatch"):
        parse_text(edit(BASE, "n_s = 1.012", "n_s = 1.012 um"))


def test_unknown_key_and_section():
    with pytest.raises(ConfigError, match="unknown key") as info:
        parse_text(edit(BASE, "n_c = 1.0", "n_c = 1.0\ncolour = blue"))
    assert info.value.where == "medium.colour"
    with pytest.raises(ConfigError, match="unknown section"):
        parse_text(BASE + "\n[extras]\nx = 1\n")


def test_missing_key():
    with pytest.raises(ConfigError, match="missing required key") as info:
        parse_text(edit(BASE, "gamma = 1.9e7 rad_per_s\n", ""))
    assert info.value.where == "medium.gamma"


def test_invariant_violation_has_context():
    with pytest.raises(ConfigError) as info:
        parse_text(edit(BASE, "n_s = 1.012", "n_s = 1.0"))
    assert info.value.where.startswith("medium.")
    assert "mismatch" in str(info.value)


def test_schedule_row_line():
    text = edit(BASE, "rad2_per_s2, 1.0879e15 rad2_per_s2", "rad2_per_s2, 1.0879e15")
    with pytest.raises(ConfigError) as info:
        parse_text(text)
    assert info.value.where == "drive.schedule"
    assert "1.0879e15 rad2_per_s2, 1.0879e15" in text.splitlines()[info.value.line - 1]


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.ini")


def test_units_convert_exactly():
    cfg = parse_text(edit(BASE, "a = 100 um", "a = 2 cm"))
    assert cfg.drive.a == 0.02
    cfg = parse_text(edit(BASE, "density = 1e14 per_cm3", "density = 3e19 per_m3"))
    assert cfg.medium.density == 3e19


def test_defaults():
    cfg = parse_config("preset:paper-guided-mode")
    L = cfg.medium.length
    assert cfg.l_s == L and cfg.l_sprime == L / 4 and cfg.pulse_width == L / 3


@given(st.floats(0.3, 2.0), st.floats(1.001, 1.1), st.floats(1e-6, 1e-3), st.integers(256, 4096))
def test_round_trip_random_values(wavelength_um, n_s, a, nz):
    text = edit(BASE, "wavelength = 0.8 um", f"wavelength = {wavelength_um!r} um")
    text = edit(text, "n_s = 1.012", f"n_s = {n_s!r}")
    text = edit(text, "a = 100 um", f"a = {a!r} m")
    text = edit(text, "nz = 1024", f"nz = {nz}")
    cfg = parse_text(text)
    assert parse_text(cfg.to_text()) == cfg
