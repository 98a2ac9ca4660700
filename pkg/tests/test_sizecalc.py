import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ME
from fluxsize.bcs_core import Material, make_material
from fluxsize.errors import DomainError, GeometryWarning
from fluxsize.sizecalc import (
    DeviceSpec,
    critical_current_ratio,
    gap_energy_integral,
    kernel_K1,
    kernel_K1_closed,
    kernel_K2,
    kernel_K2_closed,
    local_mode_change_density,
    magnetic_moment_difference,
    round_half_even,
    sharvin_resistance,
    total_mode_change,
)

E = 1.602176634e-19
MU_B = 9.2740100783e-24


def test_kernels_match_closed_form(al, nb):
    for mat in (al, nb):
        assert kernel_K1(mat) == pytest.approx(kernel_K1_closed(mat), rel=1e-6)
        assert kernel_K2(mat) == pytest.approx(kernel_K2_closed(mat), rel=1e-6)


def test_kernel_closed_forms_by_hand(al):
    k1 = al.dos_fermi * 2 * ME**2 * al.chemical_potential / al.hbar**3
    assert kernel_K1_closed(al) == pytest.approx(k1, rel=1e-15)
    assert kernel_K2_closed(al) == pytest.approx(al.hbar * al.fermi_wavevector / ME * k1, rel=1e-15)


def test_kernels_toy_units():
    toy = Material("toy", 1.0, 1e-4, 1.0, 1.0, 0.5, 1.0, 1.0, 1.0)
    assert kernel_K1(toy) == pytest.approx(1.0, rel=1e-6)
    assert kernel_K2(toy) == pytest.approx(1.0, rel=1e-6)


@given(st.floats(-30, -18))
def test_energy_integral_is_one(log_gap):
    assert gap_energy_integral(10.0**log_gap) == pytest.approx(1.0, abs=1e-8)


def test_energy_integral_domain():
    with pytest.raises(DomainError):
        gap_energy_integral(0.0)


def test_local_density_zero(al):
    assert local_mode_change_density(0.0, al) == 0.0


def test_local_density_matches_kernel_ratio(al):
    # delta n = (K1 / K2) (3 / 4 |e|) |delta j| = 3 |delta j| / (4 |e| v_F)
    dj = 1.7e9
    ratio = kernel_K1_closed(al) / kernel_K2_closed(al)
    assert local_mode_change_density(dj, al) == pytest.approx(ratio * 3 * dj / (4 * E), rel=1e-14)
    assert local_mode_change_density(dj, al) == pytest.approx(3 * dj / (4 * E * 2.02e6), rel=1e-15)


def test_local_density_rejects_negative(al):
    with pytest.raises(DomainError):
        local_mode_change_density(-1.0, al)


def _device(mat, length, current):
    return DeviceSpec("d", mat, length, 0.5 * (length / 4) ** 2, current)


@pytest.mark.parametrize("vf,length,current,expected", [
    (2.02e6, 20e-6, (900e-9, 900e-9), 41.7),
    (2.02e6, 183e-6, (292e-9, 292e-9), 123.8),
])
def test_total_mode_change_table(vf, length, current, expected):
    mat = make_material("Al", vf, tc=1.2)
    lo, hi = total_mode_change(_device(mat, length, current))
    assert lo == hi
    assert lo == pytest.approx(3 * length * current[0] / (4 * E * vf), rel=1e-15)
    assert abs(lo - expected) < 0.5
    assert round_half_even(lo) == round(expected)


def test_total_mode_change_range(nb):
    lo, hi = total_mode_change(_device(nb, 560e-6, (2e-6, 3e-6)))
    assert lo == pytest.approx(3 * 560e-6 * 2e-6 / (4 * E * 1.37e6), rel=1e-14)
    assert lo == pytest.approx(3826.91, abs=0.01) and hi == pytest.approx(5740.37, abs=0.01)
    assert 3800 * 0.99 <= lo and hi <= 5750 * 1.01


def test_zero_current(al):
    assert total_mode_change(_device(al, 1e-5, (0.0, 0.0))) == (0.0, 0.0)


@settings(max_examples=30)
@given(st.floats(1e-6, 1e-3), st.floats(1e-9, 1e-5), st.floats(1.5, 3.0))
def test_total_mode_change_linear(length, current, scale):
    mat = make_material("Al", 2.02e6, tc=1.2)
    a, _ = total_mode_change(_device(mat, length, (current, current)))
    b, _ = total_mode_change(_device(mat, length, (scale * current, scale * current)))
    assert b == pytest.approx(scale * a, rel=1e-13)


def test_magnetic_moment(al):
    dev = DeviceSpec("Delft", al, 20e-6, 2.47e-11, (900e-9, 900e-9))
    (j_lo, j_hi), (b_lo, b_hi) = magnetic_moment_difference(dev)
    assert j_lo == pytest.approx(2.47e-11 * 900e-9, rel=1e-15)
    assert b_lo == pytest.approx(2.4e6, rel=0.01)


def test_device_validation(al):
    with pytest.raises(DomainError):
        DeviceSpec("x", al, -1.0, 1e-12, (1e-7, 1e-7))
    with pytest.raises(DomainError):
        DeviceSpec("x", al, 1e-5, 0.0, (1e-7, 1e-7))
    with pytest.raises(DomainError):
        DeviceSpec("x", al, 1e-5, 1e-12, (2e-7, 1e-7))


def test_geometry_warning(al):
    with pytest.warns(GeometryWarning):
        DeviceSpec("x", al, 4e-6, 2e-12, (1e-7, 1e-7))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        DeviceSpec("x", al, 4e-6, 1e-12, (1e-7, 1e-7))


def test_sharvin_and_critical_current_ratio(al):
    area = 1e-14
    channels = area * al.fermi_wavevector**2 / (4 * math.pi)
    r_s = sharvin_resistance(al, area)
    assert r_s == pytest.approx(2 * math.pi * al.hbar / (2 * E**2 * channels), rel=1e-14)
    assert critical_current_ratio(0.5, 10 * r_s, r_s) == pytest.approx(20 * math.pi, rel=1e-15)
    with pytest.raises(DomainError):
        critical_current_ratio(0.0, 1.0, 1.0)


def test_round_half_even():
    assert round_half_even(41.7) == 42
    assert round_half_even(2.5) == 2
    assert isinstance(round_half_even(np.float64(3.2)), int)
