import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fluxsize.errors import ConfigurationError, DomainError
from fluxsize.junction import JunctionSpec, cross_junction_delta_n, golden_rule_calibration, junction_total


def _q(mat, x):
    return (0.0, 0.0, math.sqrt(2 * mat.electron_mass * (mat.chemical_potential + x * mat.gap)) / mat.hbar)


def test_zero_tunnelling(al):
    assert cross_junction_delta_n(_q(al, 0), _q(al, 0), 0.0, al) == 0.0


def test_fermi_surface_value(al):
    t = 0.01 * al.gap
    dn = cross_junction_delta_n(_q(al, 0), _q(al, 0), t, al)
    assert dn == pytest.approx(0.005, rel=1e-9)
    assert dn == pytest.approx(t / (2 * al.gap), rel=1e-9)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_symmetric_and_bounded(xl, xr):
    from fluxsize.bcs_core import make_material
    mat = make_material("Al", 2.02e6, tc=1.2)
    t = 0.02 * mat.gap
    a = cross_junction_delta_n(_q(mat, xl), _q(mat, xr), t, mat)
    b = cross_junction_delta_n(_q(mat, xr), _q(mat, xl), t, mat)
    assert a == b
    assert a <= t / (2 * mat.gap) * (1 + 1e-9)


def _spec(t, count=1000.0, rng=None, window=5.0):
    return JunctionSpec(t, count, energy_window=window, t_amp_range=rng)


def test_junction_total_closed_form(al):
    # mean of Delta^2 |T| / (2 Omega^3) over |E| < W Delta is |T| / (2 Delta sqrt(1 + W^2))
    t = 0.01 * al.gap
    for w in (3.0, 5.0, 8.0):
        est = junction_total(_spec(t, 1000.0, window=w), al)
        assert est.value == pytest.approx(1000 * t / (2 * al.gap * math.sqrt(1 + w * w)), rel=1e-10)


def test_junction_total_quadrature_oracle(al):
    t = 0.01 * al.gap
    avg = integrate.quad(lambda x: 0.5 / (1 + x * x) ** 1.5, -5, 5)[0] / 10
    assert junction_total(_spec(t), al).value == pytest.approx(1000 * avg * t / al.gap, rel=1e-9)


def test_junction_total_linear(al):
    full = junction_total(_spec(0.01 * al.gap), al).value
    half = junction_total(_spec(0.005 * al.gap), al).value
    assert half == pytest.approx(full / 2, rel=1e-14)
    assert junction_total(_spec(0.0), al).value == 0.0


def test_junction_phase_sign_irrelevant(al):
    a = JunctionSpec(0.01 * al.gap, 100.0, phase_difference=0.7)
    b = JunctionSpec(0.01 * al.gap, 100.0, phase_difference=-0.7)
    assert junction_total(a, al).value == junction_total(b, al).value


def test_junction_range(al):
    est = junction_total(_spec(0.01 * al.gap, rng=(0.008 * al.gap, 0.012 * al.gap)), al)
    assert est.lo < est.value < est.hi
    assert est.hi / est.lo == pytest.approx(1.5, rel=1e-12)


def test_uncalibrated(al):
    with pytest.raises(ConfigurationError):
        junction_total(JunctionSpec(None, 10.0), al)
    with pytest.raises(ConfigurationError):
        junction_total(JunctionSpec(1e-25, None), al)


def test_spec_validation():
    with pytest.raises(DomainError):
        JunctionSpec(-1.0, 10.0)
    with pytest.raises(DomainError):
        JunctionSpec(1.0, -10.0)
    with pytest.raises(DomainError):
        JunctionSpec(1.0, 10.0, t_amp_range=(2.0, 1.0))


def test_golden_rule_calibration(al):
    area = 1e-14
    channels = area * al.fermi_wavevector**2 / (4 * math.pi)
    r_s = 2 * math.pi * al.hbar / (2 * al.electron_charge**2 * channels)
    jct = golden_rule_calibration(al, 1e4 * r_s, area, spread=0.1)
    assert jct.t_amp == pytest.approx(0.5 * al.gap * math.sqrt(1e-4), rel=1e-12)
    assert jct.mode_count == pytest.approx(channels * 4 * 10 / math.pi, rel=1e-12)
    assert jct.t_amp_range == pytest.approx((0.9 * jct.t_amp, 1.1 * jct.t_amp))
    assert "golden rule" in jct.calibration_note
    # transmission is capped at 1
    assert golden_rule_calibration(al, 1e-3 * r_s, area).t_amp == pytest.approx(0.5 * al.gap)
