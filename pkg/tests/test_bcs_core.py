import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from conftest import AL_GAP, AL_VF, HBAR, ME
from fluxsize.bcs_core import (
    BranchPair,
    Material,
    Mode,
    bcs_occupation,
    critical_velocity,
    gap_equation_residual,
    lab_frame_wavevector,
    make_material,
    occupation,
    occupation_difference,
    occupation_difference_bound,
    pair_occupation_difference,
    perturbation_parameter,
    quasiparticle_energy,
    solve_gap,
)
from fluxsize.errors import (
    DomainError,
    NoSolutionError,
    PerturbationDomainError,
    PerturbativeBreakdownWarning,
)


def test_material_defaults(al):
    assert al.gap == pytest.approx(AL_GAP, rel=1e-15)
    assert al.chemical_potential == pytest.approx(0.5 * ME * AL_VF**2, rel=1e-15)
    assert al.fermi_wavevector == pytest.approx(ME * AL_VF / HBAR, rel=1e-15)
    # both spins: m q_F / (pi^2 hbar^2)
    assert al.dos_fermi == pytest.approx(ME * (ME * AL_VF / HBAR) / (math.pi**2 * HBAR**2), rel=1e-14)
    assert al.gap < al.debye_energy


@pytest.mark.parametrize("field,value", [("gap", -1.0), ("fermi_velocity", 0.0), ("hbar", math.nan)])
def test_material_rejects_nonpositive(al, field, value):
    kwargs = {f: getattr(al, f) for f in al.__dataclass_fields__}
    kwargs[field] = value
    with pytest.raises(DomainError):
        Material(**kwargs)


def test_material_rejects_inconsistent_mu(al):
    kwargs = {f: getattr(al, f) for f in al.__dataclass_fields__}
    kwargs["chemical_potential"] *= 1 + 1e-6
    with pytest.raises(DomainError, match="chemical_potential"):
        Material(**kwargs)


def test_material_rejects_strong_coupling(al):
    kwargs = {f: getattr(al, f) for f in al.__dataclass_fields__}
    kwargs["gap"] = 2 * al.debye_energy
    with pytest.raises(DomainError, match="weak coupling"):
        Material(**kwargs)


def test_make_material_needs_one_gap_source():
    with pytest.raises(DomainError):
        make_material("Al", 2e6)
    with pytest.raises(DomainError):
        make_material("Al", 2e6, gap=1e-23, tc=1.0)
    with pytest.raises(DomainError, match="Debye"):
        make_material("Xx", 2e6, tc=1.0)


def test_make_material_from_coupling():
    omega = 1.380649e-23 * 400
    mat = make_material("X", 1.5e6, coupling=0.2, debye_energy=omega)
    assert mat.gap == pytest.approx(omega / math.sinh(5.0), rel=1e-12)
    assert mat.coupling == pytest.approx(0.2, rel=1e-12)


# -- energetics -------------------------------------------------------------------

def test_quasiparticle_energy_fermi_surface(al):
    e, om = quasiparticle_energy(al.fermi_wavevector, al)
    assert abs(e) < 1e-12 * al.chemical_potential
    assert om == pytest.approx(al.gap, rel=1e-9)


def test_quasiparticle_energy_band_bottom(al):
    e, om = quasiparticle_energy(0.0, al)
    assert e == -al.chemical_potential
    assert om == pytest.approx(math.hypot(al.chemical_potential, al.gap), rel=1e-15)


def test_quasiparticle_energy_off_surface(al):
    e, om = quasiparticle_energy(1.01 * al.fermi_wavevector, al)
    assert e / al.chemical_potential == pytest.approx(1.01**2 - 1, rel=1e-12)
    assert e / al.chemical_potential == pytest.approx(0.0201, rel=1e-9)
    assert om == pytest.approx(math.hypot(e, al.gap), rel=1e-15)


@pytest.mark.parametrize("bad", [math.inf, math.nan, -1.0])
def test_quasiparticle_energy_domain(al, bad):
    with pytest.raises(DomainError):
        quasiparticle_energy(bad, al)


@given(st.floats(0.0, 5.0))
def test_omega_never_below_gap(x):
    mat = make_material("Al", 2.02e6, tc=1.2)
    _, om = quasiparticle_energy(x * mat.fermi_wavevector, mat)
    assert om >= mat.gap


def test_critical_velocity(al):
    assert critical_velocity(al) == pytest.approx(AL_GAP / (ME * AL_VF), rel=1e-14)
    assert critical_velocity(al) == pytest.approx(15.88, rel=1e-3)
    assert perturbation_parameter((0, 0, 0), al) == 0
    assert perturbation_parameter((0, 0, critical_velocity(al)), al) == pytest.approx(1.0, rel=1e-15)


def test_lab_frame_wavevector(al):
    q = lab_frame_wavevector((al.fermi_wavevector, 0, 0), (0, 0, 1.0), al)
    assert q[0] == al.fermi_wavevector
    assert q[2] == pytest.approx(ME / HBAR, rel=1e-15)
    assert q[2] == pytest.approx(8.64e3, rel=1e-3)
    np.testing.assert_array_equal(lab_frame_wavevector((1.0, 2.0, 3.0), (0, 0, 0), al), [1, 2, 3])


# -- gap equation -----------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.1, 0.2, 0.3, 0.4, 0.5])
def test_gap_closed_form(lam):
    assert solve_gap(lam, 1.0) == pytest.approx(1 / math.sinh(1 / lam), rel=1e-12)


def test_gap_examples():
    assert solve_gap(0.3, 1.0) == pytest.approx(0.07144, abs=5e-6)
    assert solve_gap(0.5, 1.0) == pytest.approx(0.2757, abs=5e-5)


def test_gap_vanishes_with_coupling():
    assert solve_gap(0.01, 1.0) < 1e-40


def test_gap_scales_with_debye_energy():
    omega = 1.380649e-23 * 300
    assert solve_gap(0.3, omega) == pytest.approx(omega / math.sinh(1 / 0.3), rel=1e-12)


def _finite_t_oracle(lam, beta):
    """Independent root of the gap equation with adaptive quadrature."""
    def f(d):
        g = lambda e: math.tanh(beta * math.hypot(e, d) / 2) / math.hypot(e, d)
        return lam * integrate.quad(g, 0, 1, epsabs=1e-13, epsrel=1e-13, limit=200)[0] - 1
    return optimize.brentq(f, 1e-8, 0.999, xtol=1e-15, rtol=1e-14)


@pytest.mark.parametrize("beta", [30.0, 60.0, 400.0])
def test_gap_finite_temperature(beta):
    lam = 0.3
    delta = solve_gap(lam, 1.0, beta)
    assert delta == pytest.approx(_finite_t_oracle(lam, beta), rel=1e-8)
    assert abs(gap_equation_residual(delta, lam, 1.0, beta)) < 1e-10


def test_gap_above_tc():
    lam = 0.3
    kt_c = 1.134 * math.exp(-1 / lam)
    with pytest.raises(NoSolutionError):
        solve_gap(lam, 1.0, beta=1 / (1.05 * kt_c))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.9), st.floats(1e-3, 1e3))
def test_gap_residual_small(lam, omega):
    delta = solve_gap(lam, omega)
    assert abs(gap_equation_residual(delta, lam, omega)) < 1e-10


# -- occupations ------------------------------------------------------------------

def test_occupation_fermi_surface(al):
    # E(q_F) carries ~1e-16 mu of round-off, amplified by mu / Delta ~ 4e5
    assert occupation((0, 0, al.fermi_wavevector), (0, 0, 0), al) == pytest.approx(0.5, abs=1e-10)


def test_occupation_deep_filled(al):
    assert occupation((0, 0, 1e-3 * al.fermi_wavevector), (0, 0, 0), al) == pytest.approx(1.0, abs=1e-9)


def test_occupation_flow_example(al):
    mode = Mode((0, 0, al.fermi_wavevector))
    n = occupation(mode, (0, 0, 5e-4), al)
    shift = ME * AL_VF * 5e-4 / (2 * AL_GAP)
    assert n - occupation(mode, (0, 0, 0), al) == pytest.approx(shift, rel=1e-9)
    assert n == pytest.approx(0.5 + shift, abs=1e-10)
    assert shift == pytest.approx(1.575e-5, rel=2e-3)


def test_occupation_rejects_supercritical(al):
    with pytest.raises(PerturbationDomainError):
        occupation((0, 0, al.fermi_wavevector), (0, 0, 1.01 * al.critical_velocity), al)


def test_occupation_warns_outside_unit_interval(al):
    # E = -Delta with near-critical flow along q: 0.854 + 0.177 * 0.99 > 1
    q = math.sqrt(2 * ME * (al.chemical_potential - al.gap)) / HBAR
    with pytest.warns(PerturbativeBreakdownWarning):
        n = occupation((0, 0, q), (0, 0, 0.99 * al.critical_velocity), al)
    assert n > 1  # returned unclamped


def _shell_vectors(mat, rng, count=50):
    x = rng.uniform(-20, 20, count) * mat.gap
    q = np.sqrt(2 * mat.electron_mass * (mat.chemical_potential + x)) / mat.hbar
    d = rng.normal(size=(count, 3))
    return q[:, None] * d / np.linalg.norm(d, axis=1)[:, None]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_flow_is_textbook(seed):
    mat = make_material("Al", 2.02e6, tc=1.2)
    q = _shell_vectors(mat, np.random.default_rng(seed))
    np.testing.assert_array_equal(occupation(q, (0, 0, 0), mat),
                                  bcs_occupation(np.linalg.norm(q, axis=1), mat))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-0.99, 0.99, allow_subnormal=False))
def test_difference_properties(seed, frac):
    mat = make_material("Al", 2.02e6, tc=1.2)
    rng = np.random.default_rng(seed)
    q = _shell_vectors(mat, rng)
    v = np.array([0.0, 0.0, frac * mat.critical_velocity])
    br = BranchPair.symmetric(v)
    dn = occupation_difference(q, br, mat)
    # antisymmetry
    np.testing.assert_allclose(occupation_difference(-q, br, mat), -dn, rtol=1e-15, atol=0)
    # per-mode bound
    assert np.all(np.abs(dn) <= occupation_difference_bound(q, br.delta_vs, mat) * (1 + 1e-12))
    # linearity
    diff = occupation(q, v, mat, warn=False) - occupation(q, -v, mat, warn=False)
    np.testing.assert_allclose(diff, dn, rtol=1e-6, atol=1e-15)


def test_difference_examples(al):
    qf = al.fermi_wavevector
    assert occupation_difference((0, 0, qf), BranchPair((0, 0, 1), (0, 0, 1)), al) == 0
    assert occupation_difference((qf, 0, 0), BranchPair.symmetric((0, 0, 5e-4)), al) == 0
    dn = occupation_difference((0, 0, qf), BranchPair((0, 0, 1e-3), (0, 0, 0)), al)
    assert dn == pytest.approx(ME * AL_VF * 1e-3 / (2 * AL_GAP), rel=1e-9)
    assert dn == pytest.approx(3.15e-5, rel=2e-3)


def test_branch_pair_delta():
    br = BranchPair((1.0, 2.0, 3.0), (0.5, -2.0, 1.0))
    assert br.delta_vs == (0.5, 4.0, 2.0)


def test_branch_pair_validate(al):
    with pytest.raises(PerturbationDomainError, match="v_right"):
        BranchPair((0, 0, 0), (0, 0, 2 * al.critical_velocity)).validate(al)


def test_mode_validation():
    with pytest.raises(DomainError):
        Mode((0, 0, math.inf))
    with pytest.raises(DomainError):
        Mode((0, 0, 1), spin=1)


def test_pair_occupation(al):
    v = np.array([0.0, 0.0, 2e-3])
    br = BranchPair.symmetric(v)
    qa = np.array([0.3, -0.2, 0.9]) * al.fermi_wavevector
    qb = -qa + 2 * ME * v / HBAR
    expected = occupation_difference(qa, br, al)
    assert pair_occupation_difference(qa, qb, br, al) == pytest.approx(expected, rel=1e-15)
    far = qb + np.array([0, 0, 1e3 * 2 * ME * 2e-3 / HBAR])
    assert pair_occupation_difference(qa, far, br, al) == 0
    zero = BranchPair((0, 0, 0), (0, 0, 0))
    assert pair_occupation_difference(qa, -qa, zero, al) == 0


def test_pair_grid_matches_single_mode(al):
    rng = np.random.default_rng(7)
    v = np.array([0.0, 1e-3, 1e-3])
    br = BranchPair(tuple(v), tuple(-v))
    q = _shell_vectors(al, rng, 30)
    for qa in q:
        for vb in (v, -v):
            qb = -qa + 2 * ME * vb / HBAR
            assert pair_occupation_difference(qa, qb, br, al) == occupation_difference(qa, br, al)


def test_occupation_quiet_when_valid(al):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        occupation((0, 0, al.fermi_wavevector), (0, 0, 1e-3), al)
