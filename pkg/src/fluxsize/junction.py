"""Tunnelling contribution to the branch occupation difference near a junction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as C
from .bcs_core import _wavevector, quasiparticle_energy
from .errors import ConfigurationError, DomainError
from .grids import gauss_legendre


@dataclass(frozen=True)
class JunctionSpec:
    """Calibrated description of the modes near a tunnel junction.

    t_amp
        Momentum-conserving tunnelling element |T_kk| (J).
    mode_count
        Number of electron modes (both sides, both spins) within a depth
        xi_0 of the barrier and within ``energy_window`` gaps of E_F.
    energy_window
        Half-width, in units of Delta, of the band of participating modes.
    t_amp_range
        ``(lo, hi)`` spread of t_amp used for the sensitivity interval.
    """

    t_amp: float | None
    mode_count: float | None
    phase_difference: float = 0.0
    energy_window: float = 5.0
    t_amp_range: tuple | None = None
    calibration_note: str = ""

    def __post_init__(self):
        if self.t_amp is not None and self.t_amp < 0:
            raise DomainError("t_amp must be >= 0")
        if self.mode_count is not None and self.mode_count < 0:
            raise DomainError("mode_count must be >= 0")
        if not self.energy_window > 0:
            raise DomainError("energy_window must be > 0")
        if self.t_amp_range is not None:
            lo, hi = (float(x) for x in self.t_amp_range)
            if lo < 0 or hi < lo:
                raise DomainError("t_amp_range must satisfy 0 <= lo <= hi")
            object.__setattr__(self, "t_amp_range", (lo, hi))

    @property
    def calibrated(self) -> bool:
        return self.t_amp is not None and self.mode_count is not None


def cross_junction_delta_n(q_left, q_right, t_amp, material):
    """delta n = Delta^2 |T| / ((Omega_L + Omega_R) Omega_L Omega_R)."""
    ql = _wavevector(q_left)
    qr = _wavevector(q_right)
    _, om_l = quasiparticle_energy(np.linalg.norm(ql, axis=-1), material)
    _, om_r = quasiparticle_energy(np.linalg.norm(qr, axis=-1), material)
    # grouped so that swapping L and R is bit-exact
    return material.gap**2 * abs(t_amp) / ((om_l + om_r) * (om_l * om_r))


def _energy_average(t_amp, material, window, n_nodes):
    """Mean delta n over momentum-conserving pairs spread uniformly in E on [-window, window] Delta."""
    x, w = gauss_legendre(n_nodes, -window, window)
    energy = x * material.gap
    q = np.sqrt(2 * material.electron_mass * (material.chemical_potential + energy)) / material.hbar
    vec = np.stack([np.zeros_like(q), np.zeros_like(q), q], axis=1)
    dn = cross_junction_delta_n(vec, vec, t_amp, material)
    return float(np.sum(w * dn)) / (2 * window)


@dataclass(frozen=True)
class TunnelEstimate:
    value: float
    lo: float
    hi: float


def junction_total(jct: JunctionSpec, material, n_nodes=256):
    """Delta N_T summed over the participating modes, with its sensitivity interval."""
    if not jct.calibrated:
        raise ConfigurationError("junction spec lacks t_amp or mode_count calibration")

    def total(t):
        return jct.mode_count * _energy_average(t, material, jct.energy_window, n_nodes)

    value = total(jct.t_amp)
    lo_t, hi_t = jct.t_amp_range if jct.t_amp_range is not None else (jct.t_amp, jct.t_amp)
    return TunnelEstimate(value, total(lo_t), total(hi_t))


def golden_rule_calibration(material, r_normal, junction_area, *, energy_window=5.0,
                            phase_difference=0.0, spread=0.0):
    """Calibrate a :class:`JunctionSpec` from the normal-state resistance.

    Each of the N_ch = A q_F^2 / 4 pi transverse channels tunnels with
    transmission D = R_S / R_N (R_S the Sharvin resistance).  For modes
    normalised over a depth xi_0 on either side the golden rule
    D = 4 pi^2 |T|^2 nu_L nu_R with nu = xi_0 / (pi hbar v_F) gives
    |T| = Delta sqrt(D) / 2.  The participating modes number
    N_ch * 2 spins * 2 sides * nu * 2 window Delta.
    """
    if not (r_normal > 0 and junction_area > 0):
        raise DomainError("r_normal and junction_area must be > 0")
    channels = junction_area * material.fermi_wavevector**2 / (4 * math.pi)
    r_sharvin = C.PLANCK / (2 * material.electron_charge**2 * channels)
    transmission = min(1.0, r_sharvin / r_normal)
    t_amp = 0.5 * material.gap * math.sqrt(transmission)
    modes_per_channel = 4 * (2 * energy_window) / math.pi
    note = (f"golden rule: R_N={r_normal:.4g} ohm, area={junction_area:.4g} m^2, "
            f"D={transmission:.4g}, |T|/Delta={t_amp / material.gap:.4g}")
    rng = None
    if spread:
        rng = (t_amp * (1 - spread), t_amp * (1 + spread))
    return JunctionSpec(t_amp, channels * modes_per_channel, phase_difference,
                        energy_window, rng, note)
