import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_stability.errors import DomainError, ZeroCurl, ZeroField
from casimir_stability.units import (
    NATURAL,
    SI,
    CavityMode,
    ModeFunctionSamples,
    UnitSystem,
    from_natural,
    load_mode_samples,
    mode_constants,
    save_mode_samples,
    sinusoidal_test_mode,
    to_natural,
)


def test_unit_scales_must_be_positive():
    with pytest.raises(DomainError):
        UnitSystem(hbar=0.0)
    with pytest.raises(DomainError):
        UnitSystem(c=-1.0)
    assert NATURAL.hbar == NATURAL.k_B == NATURAL.c == 1.0
    assert SI.c == 299792458.0


@pytest.mark.parametrize("quantity", ["frequency", "time", "temperature", "energy", "length", "rate"])
@given(value=st.floats(min_value=1e-30, max_value=1e30))
def test_si_round_trip(quantity, value):
    back = from_natural(to_natural(value, quantity), quantity)
    assert abs(back - value) <= 1e-14 * abs(value)


def test_temperature_conversion():
    # k_B * 1 K / hbar in rad/s
    assert to_natural(1.0, "temperature") == pytest.approx(1.380649e-23 / (6.62607015e-34 / (2 * math.pi)), rel=1e-12)
    with pytest.raises(DomainError):
        to_natural(1.0, "furlongs")


def test_cavity_mode_frequency_is_derived():
    m = CavityMode(capacitance=2.0, inverse_inductance=8.0, c=1.0)
    assert m.bare_frequency == 2.0
    assert m.bare_frequency**2 == pytest.approx(m.c**2 / (m.inductance * m.capacitance), rel=1e-15)
    assert CavityMode.from_frequency(3.0, 0.5).bare_frequency == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(DomainError):
        CavityMode(0.0, 1.0)
    with pytest.raises(DomainError):
        CavityMode(1.0, -1.0)


def test_builtin_mode_constants():
    # C = L^3/(4 pi), 1/Lambda = pi L / 4 for K = z sqrt2 sin(pi x/L)
    L = 2.0
    mode = mode_constants(sinusoidal_test_mode(16, L))
    assert mode.capacitance == pytest.approx(L**3 / (4 * math.pi), rel=1e-12)
    assert mode.inverse_inductance == pytest.approx(math.pi * L / 4, rel=1e-12)
    assert mode.bare_frequency == pytest.approx(math.pi / L, rel=1e-12)


def test_zero_field_and_zero_curl():
    s = sinusoidal_test_mode(4)
    with pytest.raises(ZeroField):
        mode_constants(ModeFunctionSamples(np.zeros_like(s.K), s.curl_K, s.spacing))
    with pytest.raises(ZeroCurl):
        mode_constants(ModeFunctionSamples(s.K, np.zeros_like(s.curl_K), s.spacing))


def test_sample_validation():
    s = sinusoidal_test_mode(4)
    with pytest.raises(DomainError):
        ModeFunctionSamples(s.K, s.curl_K[:3], s.spacing)
    with pytest.raises(DomainError):
        ModeFunctionSamples(s.K, s.curl_K, (0.1, 0.0, 0.1))
    one = ModeFunctionSamples(s.K[:1], s.curl_K[:1], s.spacing)
    with pytest.raises(DomainError):
        mode_constants(one)


def test_doubling_field_quadruples_constants():
    s = sinusoidal_test_mode(8)
    m1 = mode_constants(s)
    m2 = mode_constants(ModeFunctionSamples(2 * s.K, 2 * s.curl_K, s.spacing))
    assert m2.capacitance == pytest.approx(4 * m1.capacitance, rel=1e-14)
    assert m2.inverse_inductance == pytest.approx(4 * m1.inverse_inductance, rel=1e-14)
    assert m2.bare_frequency == pytest.approx(m1.bare_frequency, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(scale=st.floats(min_value=0.1, max_value=10.0))
def test_frequency_scale_invariant(scale):
    rng = np.random.default_rng(7)
    K = rng.normal(size=(3, 4, 5, 3))
    cK = rng.normal(size=(3, 4, 5, 3))
    base = mode_constants(ModeFunctionSamples(K, cK, (0.1, 0.2, 0.3))).bare_frequency
    scaled = mode_constants(ModeFunctionSamples(scale * K, scale * cK, (0.1, 0.2, 0.3))).bare_frequency
    assert abs(scaled - base) <= 1e-12 * base


def test_midpoint_rule_is_second_order_on_non_periodic_field():
    # K = z * x on [0, 1]^3: int |K|^2 = 1/3, curl K = -y: int = 1
    errs = []
    for n in (4, 8, 16, 32):
        h = 1.0 / n
        x = (np.arange(n) + 0.5) * h
        K = np.zeros((n, n, n, 3))
        K[..., 2] = x[:, None, None]
        cK = np.zeros_like(K)
        cK[..., 1] = 1.0
        m = mode_constants(ModeFunctionSamples(K, cK, (h, h, h)))
        errs.append(abs(m.bare_frequency - math.sqrt(3.0)) / math.sqrt(3.0))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(r > 3.5 for r in ratios)


def test_csv_round_trip(tmp_path):
    s = sinusoidal_test_mode(5, 1.5)
    path = tmp_path / "mode.csv"
    save_mode_samples(s, path)
    loaded = load_mode_samples(path)
    assert loaded.shape == s.shape
    np.testing.assert_allclose(loaded.spacing, s.spacing, rtol=1e-15)
    np.testing.assert_array_equal(loaded.K, s.K)
    np.testing.assert_array_equal(loaded.curl_K, s.curl_K)
    assert mode_constants(loaded).bare_frequency == pytest.approx(math.pi / 1.5, rel=1e-12)


def test_csv_spacing_inferred_and_header_checked(tmp_path):
    s = sinusoidal_test_mode(3)
    path = tmp_path / "mode.csv"
    save_mode_samples(s, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join([lines[0]] + lines[2:]) + "\n")  # drop the dx line
    assert load_mode_samples(path).spacing == pytest.approx(s.spacing, rel=1e-12)
    bad = tmp_path / "bad.csv"
    bad.write_text("# nx=1 ny=1 nz=1\nx,y,z\n0,0,0\n")
    with pytest.raises(DomainError):
        load_mode_samples(bad)
