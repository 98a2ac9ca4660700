"""Zero-temperature BCS ground-state quantities.

Materials, modes and branch pairs, the gap equation, quasiparticle
energetics, and first-order (in the superfluid velocity) occupation numbers
of single-electron and Cooper-pair modes.

All quantities are SI.  ``dos_fermi`` counts both spin orientations per unit
volume per unit energy.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import constants as C
from .errors import (
    ConvergenceError,
    DomainError,
    NoSolutionError,
    PerturbationDomainError,
    PerturbativeBreakdownWarning,
)

# Debye temperatures (K) used as defaults for the bundled materials.
DEBYE_TEMPERATURE = {"Al": 428.0, "Nb": 275.0}


@dataclass(frozen=True)
class Material:
    """Bulk superconductor parameters.

    Build these with :func:`make_material` unless every field is known.
    """

    name: str
    fermi_velocity: float
    gap: float
    debye_energy: float
    dos_fermi: float
    chemical_potential: float
    electron_mass: float = C.ELECTRON_MASS
    electron_charge: float = C.ELEMENTARY_CHARGE
    hbar: float = C.HBAR

    def __post_init__(self):
        for name in ("fermi_velocity", "gap", "debye_energy", "dos_fermi",
                     "chemical_potential", "electron_mass", "electron_charge",
                     "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        kinetic = 0.5 * self.electron_mass * self.fermi_velocity**2
        if abs(kinetic - self.chemical_potential) > 1e-9 * self.chemical_potential:
            raise DomainError(
                "chemical_potential inconsistent with fermi_velocity: "
                f"mu={self.chemical_potential!r}, m v_F^2/2={kinetic!r}")
        if not self.gap < self.debye_energy:
            raise DomainError("weak coupling requires gap < debye_energy")

    @property
    def fermi_wavevector(self) -> float:
        return self.electron_mass * self.fermi_velocity / self.hbar

    @property
    def critical_velocity(self) -> float:
        return critical_velocity(self)

    @property
    def coherence_length(self) -> float:
        """xi_0 = hbar v_F / Delta."""
        return self.hbar * self.fermi_velocity / self.gap

    @property
    def coupling(self) -> float:
        """Dimensionless rho_F g reproducing ``gap`` at T = 0."""
        return 1.0 / math.asinh(self.debye_energy / self.gap)


def free_electron_dos(fermi_velocity, electron_mass=None, hbar=None):
    """Free-electron density of states at E_F, both spins, per J per m^3."""
    m = C.ELECTRON_MASS if electron_mass is None else electron_mass
    hb = C.HBAR if hbar is None else hbar
    q_f = m * fermi_velocity / hb
    return m * q_f / (math.pi**2 * hb**2)


def make_material(name, fermi_velocity, *, gap=None, tc=None,
                  debye_energy=None, coupling=None, dos_fermi=None):
    """Build a :class:`Material` from a Fermi velocity and one gap source.

    Exactly one of ``gap`` (J), ``tc`` (K) or ``coupling`` (rho_F g) sets the
    gap; ``coupling`` needs ``debye_energy``.  Missing Debye energies fall back
    to the bundled Debye temperatures; missing densities of states to the
    free-electron value.
    """
    sources = [s for s in (gap, tc, coupling) if s is not None]
    if len(sources) != 1:
        raise DomainError("give exactly one of gap, tc, coupling")
    if debye_energy is None:
        if name not in DEBYE_TEMPERATURE:
            raise DomainError(f"no default Debye energy for material {name!r}")
        debye_energy = C.BOLTZMANN * DEBYE_TEMPERATURE[name]
    if tc is not None:
        gap = C.BCS_GAP_RATIO * C.BOLTZMANN * tc
    elif coupling is not None:
        gap = solve_gap(coupling, debye_energy)
    m = C.ELECTRON_MASS
    if dos_fermi is None:
        dos_fermi = free_electron_dos(fermi_velocity, m, C.HBAR)
    return Material(
        name=name,
        fermi_velocity=float(fermi_velocity),
        gap=float(gap),
        debye_energy=float(debye_energy),
        dos_fermi=float(dos_fermi),
        chemical_potential=0.5 * m * fermi_velocity**2,
        electron_mass=m,
        electron_charge=C.ELEMENTARY_CHARGE,
        hbar=C.HBAR,
    )


@dataclass(frozen=True)
class Mode:
    """A laboratory-frame plane-wave mode (wavevector in 1/m, spin +-1/2)."""

    q: tuple
    spin: float = 0.5

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        if len(q) != 3 or not all(math.isfinite(x) for x in q):
            raise DomainError(f"mode wavevector must be a finite 3-vector, got {self.q!r}")
        if self.spin not in (0.5, -0.5):
            raise DomainError(f"spin must be +-1/2, got {self.spin!r}")
        object.__setattr__(self, "q", q)

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.q)


@dataclass(frozen=True)
class BranchPair:
    """Mean superfluid velocities (m/s) of the two circulating-current branches."""

    v_left: tuple
    v_right: tuple
    delta_vs: tuple = field(init=False)

    def __post_init__(self):
        vl = tuple(float(x) for x in self.v_left)
        vr = tuple(float(x) for x in self.v_right)
        if len(vl) != 3 or len(vr) != 3:
            raise DomainError("branch velocities must be 3-vectors")
        object.__setattr__(self, "v_left", vl)
        object.__setattr__(self, "v_right", vr)
        object.__setattr__(self, "delta_vs", tuple(a - b for a, b in zip(vl, vr)))

    @classmethod
    def symmetric(cls, v):
        """Branches circulating with +v and -v."""
        v = np.asarray(v, dtype=float)
        return cls(tuple(v), tuple(-v))

    def validate(self, material: Material) -> None:
        v_crit = critical_velocity(material)
        for label, v in (("v_left", self.v_left), ("v_right", self.v_right)):
            if np.linalg.norm(v) >= v_crit:
                raise PerturbationDomainError(
                    f"|{label}| = {np.linalg.norm(v):.6g} m/s >= v_crit = {v_crit:.6g} m/s")


def _wavevector(q):
    if isinstance(q, Mode):
        return q.vector
    return np.asarray(q, dtype=float)


def _check_velocity(vs, material):
    vs = np.asarray(vs, dtype=float)
    speed = np.linalg.norm(vs)
    v_crit = critical_velocity(material)
    if not speed < v_crit:
        raise PerturbationDomainError(
            f"|v_s| = {speed:.6g} m/s >= v_crit = {v_crit:.6g} m/s")
    return vs


# -- energetics ---------------------------------------------------------------

def kinetic_energy(q_mag, material):
    """E = hbar^2 q^2 / 2m - mu."""
    q_mag = np.asarray(q_mag, dtype=float)
    if not np.all(np.isfinite(q_mag)):
        raise DomainError("wavevector magnitude must be finite")
    if np.any(q_mag < 0):
        raise DomainError("wavevector magnitude must be >= 0")
    hb, m = material.hbar, material.electron_mass
    return hb**2 * q_mag**2 / (2 * m) - material.chemical_potential


def quasiparticle_energy(q_mag, material):
    """Return ``(E, Omega)`` with Omega = sqrt(E^2 + Delta^2)."""
    e = kinetic_energy(q_mag, material)
    return e, np.hypot(e, material.gap)


def critical_velocity(material) -> float:
    """Depairing velocity v_crit = Delta / (m v_F)."""
    return material.gap / (material.electron_mass * material.fermi_velocity)


def perturbation_parameter(vs, material) -> float:
    """|v_s| v_F m / Delta, the expansion parameter of the occupation numbers."""
    speed = float(np.linalg.norm(np.asarray(vs, dtype=float)))
    return speed * material.fermi_velocity * material.electron_mass / material.gap


def lab_frame_wavevector(k, vs, material):
    """q = k + m v_s / hbar."""
    k = np.asarray(k, dtype=float)
    vs = np.asarray(vs, dtype=float)
    return k + material.electron_mass * vs / material.hbar


# -- gap equation -------------------------------------------------------------

_PANEL_NODES, _PANEL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gap_integral(delta, omega_d, beta):
    """I(Delta) = int_0^omega_D dE tanh(beta Omega/2)/Omega and dI/dDelta.

    Uses E = Delta sinh(t), which turns the integrand into
    tanh(beta Delta cosh(t) / 2) on [0, asinh(omega_D/Delta)].
    """
    top = math.asinh(omega_d / delta)
    dtop = -omega_d / (delta * math.hypot(omega_d, delta))
    n_panels = max(1, math.ceil(top))
    edges = np.linspace(0.0, top, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _PANEL_NODES[None, :]).ravel()
    w = (half[:, None] * _PANEL_WEIGHTS[None, :]).ravel()
    if math.isinf(beta):
        return float(np.sum(w)), dtop
    cosh_t = np.cosh(t)
    arg = 0.5 * beta * delta * cosh_t
    value = float(np.sum(w * np.tanh(arg)))
    sech2 = 1.0 / np.cosh(np.minimum(arg, 350.0)) ** 2
    deriv = float(np.sum(w * sech2 * 0.5 * beta * cosh_t))
    deriv += math.tanh(0.5 * beta * math.hypot(omega_d, delta)) * dtop
    return value, deriv


def gap_equation_residual(delta, coupling, debye_energy, beta=math.inf):
    """rho_F g * int_{-omega_D}^{omega_D} tanh(beta Omega/2)/(2 Omega) dE - 1."""
    value, _ = _gap_integral(delta, debye_energy, beta)
    return coupling * value - 1.0


def solve_gap(coupling, debye_energy, beta=math.inf, *, tol=1e-10, max_iter=400):
    """Solve the BCS gap equation for Delta.

    Parameters
    ----------
    coupling : float
        Dimensionless rho_F g, in (0, 1).
    debye_energy : float
        Cutoff omega_D (any energy unit; the result is in the same unit).
    beta : float
        Inverse temperature in inverse energy units; ``math.inf`` for T = 0.

    Bisection in log(Delta) brackets the root, Newton steps polish it.  A gap
    too small to represent as a float (T = 0 with vanishing coupling) is
    returned as 0.0.
    """
    if not 0 < coupling < 1:
        raise DomainError(f"coupling must lie in (0, 1), got {coupling!r}")
    if not debye_energy > 0:
        raise DomainError("debye_energy must be > 0")
    if not beta > 0:
        raise DomainError("beta must be > 0")

    # work in units of omega_D; the equation depends only on Delta/omega_D
    # and beta*omega_D
    beta_r = beta * debye_energy

    def f(x):
        value, deriv = _gap_integral(x, 1.0, beta_r)
        return coupling * value - 1.0, coupling * deriv

    lo, hi = 1e-300, 1.0 - 1e-12
    f_lo, _ = f(lo)
    f_hi, _ = f(hi)
    if f_hi > 0:
        raise NoSolutionError("gap would exceed omega_D (coupling too strong)")
    if f_lo <= 0:
        if math.isinf(beta):
            return 0.0
        raise NoSolutionError("no gap: temperature at or above T_c")

    for _ in range(max_iter):
        if hi / lo < 1.001:
            break
        mid = math.sqrt(lo * hi)
        if f(mid)[0] > 0:
            lo = mid
        else:
            hi = mid
    delta = math.sqrt(lo * hi)
    for _ in range(max_iter):
        res, slope = f(delta)
        if res > 0:
            lo = delta
        else:
            hi = delta
        step = res / slope if slope != 0 else 0.0
        new = delta - step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - delta) <= 4 * np.finfo(float).eps * delta:
            delta = new
            break
        delta = new
    else:
        raise ConvergenceError("gap solver did not converge")
    res, _ = f(delta)
    if abs(res) >= tol:
        raise ConvergenceError(f"gap residual {res:.3g} above tolerance {tol:.3g}")
    return delta * debye_energy


# -- occupations --------------------------------------------------------------

def bcs_occupation(q_mag, material):
    """Textbook v_k^2 = (1 - E/Omega)/2 at zero superflow."""
    e, om = quasiparticle_energy(q_mag, material)
    return 0.5 * (1.0 - e / om)


def occupation(q, vs, material, *, warn=True):
    """First-order occupation of lab-frame mode(s) ``q`` in a flowing condensate.

    n_q = (1 - E_q/Omega_q)/2 + (Delta^2 / 2 Omega_q^3) hbar q . v_s

    ``q`` may be a :class:`Mode`, a 3-vector, or an ``(..., 3)`` array.  Values
    outside [0, 1] mean the expansion has broken down; they are returned as is
    and a :class:`PerturbativeBreakdownWarning` is issued.
    """
    q = _wavevector(q)
    vs = _check_velocity(vs, material)
    e, om = quasiparticle_energy(np.linalg.norm(q, axis=-1), material)
    shift = 0.5 * material.gap**2 / om**3 * material.hbar * (q @ vs)
    n = 0.5 * (1.0 - e / om) + shift
    if warn and np.any((n < 0) | (n > 1)):
        warnings.warn("occupation outside [0, 1]: first-order expansion invalid",
                      PerturbativeBreakdownWarning, stacklevel=2)
    return n


def occupation_difference(q, branches: BranchPair, material):
    """delta n_q = n_q(left) - n_q(right) = (Delta^2 / 2 Omega^3) hbar q . delta v_s."""
    branches.validate(material)
    q = _wavevector(q)
    _, om = quasiparticle_energy(np.linalg.norm(q, axis=-1), material)
    dv = np.asarray(branches.delta_vs)
    return 0.5 * material.gap**2 / om**3 * material.hbar * (q @ dv)


def occupation_difference_bound(q, delta_vs, material):
    """hbar |q . delta v_s| / (2 Delta), the largest possible |delta n_q|."""
    q = _wavevector(q)
    return material.hbar / (2 * material.gap) * np.abs(q @ np.asarray(delta_vs, dtype=float))


def pair_occupation_difference(qa, qb, branches: BranchPair, material, *, atol=None):
    """Branch difference of the Cooper-pair mode built on ``qa`` and ``qb``.

    The two electron modes are pair-correlated when qb = -qa + 2 m v_s / hbar
    for the superfluid velocity of either branch; the first-order pair
    difference then equals the single-mode ``delta n_qa``.  Uncorrelated modes
    give zero at this order.  ``atol`` (1/m) is the pairing tolerance; the
    default only absorbs floating-point round-off.
    """
    branches.validate(material)
    qa = _wavevector(qa)
    qb = _wavevector(qb)
    if atol is None:
        atol = 1e-12 * max(np.linalg.norm(qa), material.fermi_wavevector)
    scale = 2 * material.electron_mass / material.hbar
    paired = False
    for v in (branches.v_left, branches.v_right):
        target = -qa + scale * np.asarray(v)
        if np.linalg.norm(qb - target) <= atol:
            paired = True
            break
    if not paired:
        return 0.0
    return float(occupation_difference(qa, branches, material))
