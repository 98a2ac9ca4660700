"""From single-mode occupation differences to Delta N_tot.

The momentum-space kernels K1, K2 are kept as verification targets only;
the mode density cancels between the occupation and current sums, which
leaves delta n(r) = 3 |delta j(r)| / (4 |e| v_F).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import constants as C
from .errors import DomainError, GeometryWarning, ResolutionError
from .grids import gauss_legendre


@dataclass(frozen=True)
class DeviceSpec:
    """A flux-qubit loop and its measured branch observables.

    ``persistent_current_diff`` is a ``(lo, hi)`` pair; a single measured
    value has lo == hi.
    """

    name: str
    material: object
    loop_length: float
    enclosed_area: float
    persistent_current_diff: tuple
    junction: object = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lo, hi = (float(x) for x in self.persistent_current_diff)
        object.__setattr__(self, "persistent_current_diff", (lo, hi))
        if not self.loop_length > 0:
            raise DomainError("loop_length must be > 0")
        if not self.enclosed_area > 0:
            raise DomainError("enclosed_area must be > 0")
        if lo < 0 or hi < lo:
            raise DomainError("persistent current difference must satisfy 0 <= lo <= hi")
        bound = (self.loop_length / 4) ** 2
        if self.enclosed_area > bound:
            warnings.warn(
                f"{self.name}: enclosed area {self.enclosed_area:.3g} m^2 exceeds (L/4)^2 = "
                f"{bound:.3g} m^2 for a planar loop of length L", GeometryWarning,
                stacklevel=2)


# -- kernels ------------------------------------------------------------------

def kernel_K1_closed(material):
    """rho_F 2 m^2 mu / hbar^3."""
    m, hb = material.electron_mass, material.hbar
    return material.dos_fermi * 2 * m**2 * material.chemical_potential / hb**3


def kernel_K2_closed(material):
    """(hbar q_F / m) K1."""
    return material.hbar * material.fermi_wavevector / material.electron_mass * kernel_K1_closed(material)


def gap_energy_integral(gap, n_nodes=32):
    """int_{-inf}^{inf} Delta^2 / (2 (E^2 + Delta^2)^{3/2}) dE by Gauss-Legendre.

    E = Delta tan(t) maps the real line onto (-pi/2, pi/2); the integrand
    becomes cos(t)/2.  The exact value is 1 for every Delta > 0.
    """
    if not gap > 0:
        raise DomainError("gap must be > 0")
    t, w = gauss_legendre(n_nodes, -math.pi / 2, math.pi / 2)
    energy = gap * np.tan(t)
    jac = gap / np.cos(t) ** 2
    om = np.hypot(energy, gap)
    return float(np.sum(w * gap**2 / (2 * om**3) * jac))


def _radial_integral(material, power, n_nodes):
    """int_0^inf dq Delta^2 / (2 Omega(q)^3), with q^power taken at q_F outside.

    Omega keeps its full q dependence.  q is traded for E (dq = m dE /
    hbar^2 q) and then E = Delta tan(t) on [atan(-mu/Delta), pi/2).
    """
    gap, mu = material.gap, material.chemical_potential
    m, hb = material.electron_mass, material.hbar
    lower = math.atan(-mu / gap)
    # split at t = 0 so the Fermi-surface peak gets its own panel
    total = 0.0
    for a, b in ((lower, 0.0), (0.0, math.pi / 2)):
        t, w = gauss_legendre(n_nodes, a, b)
        energy = gap * np.tan(t)
        q = np.sqrt(2 * m * (mu + energy)) / hb
        integrand = 0.5 * np.cos(t) * m / (hb**2 * q)
        total += float(np.sum(w * integrand))
    return total * material.fermi_wavevector**power


def kernel_K1(material, n_nodes=64, rtol=1e-6):
    """Numerical K1 = rho_F hbar q_F^3 int dq Delta^2 / (2 Omega^3).

    Doubles the node count until two successive estimates agree to ``rtol``.
    """
    return _converged(lambda n: material.dos_fermi * material.hbar
                      * _radial_integral(material, 3, n), n_nodes, rtol)


def kernel_K2(material, n_nodes=64, rtol=1e-6):
    """Numerical K2 = rho_F (hbar^2 q_F^4 / m) int dq Delta^2 / (2 Omega^3)."""
    pref = material.dos_fermi * material.hbar**2 / material.electron_mass
    return _converged(lambda n: pref * _radial_integral(material, 4, n), n_nodes, rtol)


def _converged(estimate, n, rtol, n_max=1 << 14):
    prev = estimate(n)
    while n < n_max:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise ResolutionError(f"kernel quadrature not converged at {n} nodes")


# -- mode counts ----------------------------------------------------------------

def local_mode_change_density(delta_j, material):
    """delta n(r) = 3 |delta j| / (4 |e| v_F), electrons per m^3 changing mode."""
    delta_j = np.asarray(delta_j, dtype=float)
    if np.any(delta_j < 0):
        raise DomainError("current density magnitude must be >= 0")
    out = 3 * delta_j / (4 * material.electron_charge * material.fermi_velocity)
    return float(out) if out.ndim == 0 else out


def total_mode_change(device: DeviceSpec):
    """Delta N_tot = 3 L delta I_p / (4 |e| v_F) as a ``(lo, hi)`` pair."""
    mat = device.material
    factor = 3 * device.loop_length / (4 * mat.electron_charge * mat.fermi_velocity)
    lo, hi = device.persistent_current_diff
    return factor * lo, factor * hi


def magnetic_moment_difference(device: DeviceSpec):
    """delta mu = A delta I_p, returned as ``((lo, hi) J/T, (lo, hi) Bohr magnetons)``."""
    lo, hi = device.persistent_current_diff
    joule_per_tesla = (device.enclosed_area * lo, device.enclosed_area * hi)
    bohr = tuple(x / C.BOHR_MAGNETON for x in joule_per_tesla)
    return joule_per_tesla, bohr


def critical_current_ratio(condensate_fraction, r_normal, r_sharvin):
    """I_c,bulk / I_c,J = 4 pi f R_N / R_S."""
    if not 0 < condensate_fraction <= 1:
        raise DomainError("condensate fraction must lie in (0, 1]")
    if not (r_normal > 0 and r_sharvin > 0):
        raise DomainError("resistances must be > 0")
    return 4 * math.pi * condensate_fraction * r_normal / r_sharvin


def sharvin_resistance(material, cross_section):
    """R_S = h / (2 e^2 N_ch), N_ch = A q_F^2 / (4 pi) transverse channels per spin."""
    channels = cross_section * material.fermi_wavevector**2 / (4 * math.pi)
    return C.PLANCK / (2 * material.electron_charge**2 * channels)


def round_half_even(x):
    """Presentation rounding for mode counts."""
    return int(round(x))
