"""Nambu-space Green's functions of the flowing BCS condensate.

Conventions
-----------
Nambu spinor (psi_up, psi_down^*).  ``g0`` is the imaginary-time propagator
G0(k, tau; k, 0) with the momentum delta function stripped; it has units
1/(J s).  A single-electron occupation is n = -hbar G_11 at time difference
0^- (first time argument earlier), which is where the decaying branch
proportional to (I - X)/2 lives, X = (E sigma_z + Delta sigma_x)/Omega.

The superflow correction is the first-order term of the Doppler-shifted
propagator G0(q - m v_s/hbar), i.e. d G0/dE times dE = -hbar q.v_s.  Its
equal-time value is the tau-independent kernel returned by ``delta_g_vs``.

Impurity corrections use the first Dyson term G U G with the imaginary-time
integral done in closed form: every factor is a sum of (|tau|/hbar)^p
exp(-Omega |tau|/hbar) pieces on each side of tau = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bcs_core import BranchPair, _check_velocity, _wavevector, quasiparticle_energy
from .errors import DomainError, ResolutionError
from .grids import FermiShellGrid, energy_nodes_for_spacing, fermi_shell_grid

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

GREEN_UNITS = "1/(J*s)"


@dataclass(frozen=True)
class NambuMatrix:
    """A 2x2 Nambu matrix, or a stack of them with shape (..., 2, 2)."""

    entries: np.ndarray
    units: str = GREEN_UNITS

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.shape[-2:] != (2, 2):
            raise DomainError(f"Nambu matrix must be (..., 2, 2), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("Nambu matrix entries must be finite")
        object.__setattr__(self, "entries", a)

    def __add__(self, other):
        if not isinstance(other, NambuMatrix):
            return NotImplemented
        if other.units != self.units:
            raise DomainError(f"cannot add {self.units} to {other.units}")
        return NambuMatrix(self.entries + other.entries, self.units)

    def __sub__(self, other):
        if not isinstance(other, NambuMatrix):
            return NotImplemented
        if other.units != self.units:
            raise DomainError(f"cannot subtract {other.units} from {self.units}")
        return NambuMatrix(self.entries - other.entries, self.units)

    def __getitem__(self, index):
        return self.entries[..., index[0], index[1]]

    def scaled(self, factor, units):
        return NambuMatrix(self.entries * factor, units)


def _projector_parts(e, om, gap):
    """X = (E sz + D sx)/Om and dX/dE = D (D sz - E sx)/Om^3 for arrays e, om."""
    e = np.asarray(e, dtype=float)[..., None, None]
    om = np.asarray(om, dtype=float)[..., None, None]
    x = (e * SIGMA_Z + gap * SIGMA_X) / om
    dx = gap * (gap * SIGMA_Z - e * SIGMA_X) / om**3
    return x, dx


def g0(k_mag, tau, material, beta=math.inf):
    """Zeroth-order imaginary-time Green's function at wavevector magnitude ``k_mag``.

    For tau > 0: exp(-Omega tau/hbar) (I + X) / (2 hbar).
    For tau < 0: -exp(-Omega |tau|/hbar) (I - X) / (2 hbar).

    ``tau`` = +0.0 and -0.0 select the two equal-time limits.  Requires
    |tau| < hbar beta / 2; the expression is the beta -> infinity form.
    """
    tau = float(tau)
    hb = material.hbar
    if not math.isfinite(tau) or abs(tau) >= 0.5 * hb * beta:
        raise DomainError(f"tau={tau!r} outside (-hbar beta/2, hbar beta/2)")
    e, om = quasiparticle_energy(k_mag, material)
    x, _ = _projector_parts(e, om, material.gap)
    decay = np.exp(-np.asarray(om) * abs(tau) / hb)[..., None, None]
    if math.copysign(1.0, tau) > 0:
        mat = decay * (IDENTITY + x) / (2 * hb)
    else:
        mat = -decay * (IDENTITY - x) / (2 * hb)
    return NambuMatrix(mat)


def delta_g_vs(mode, vs, material):
    """Equal-time first-order superflow correction at lab wavevector ``mode``.

    -Delta (Delta sigma_z - E_q sigma_x) (q . v_s) / (2 Omega_q^3), units 1/(J s).
    Multiply by hbar (``.scaled(hbar, 'dimensionless')``) for the occupation
    kernel.
    """
    q = _wavevector(mode)
    vs = _check_velocity(vs, material)
    e, om = quasiparticle_energy(np.linalg.norm(q, axis=-1), material)
    gap = material.gap
    e_ = np.asarray(e)[..., None, None]
    om_ = np.asarray(om)[..., None, None]
    qv = np.asarray(q @ vs)[..., None, None]
    mat = -gap * (gap * SIGMA_Z - e_ * SIGMA_X) * qv / (2 * om_**3)
    return NambuMatrix(mat)


def delta_g_T(mode, phase_diff, t_amp, material):
    """First-order tunnelling correction for a momentum-conserving element ``t_amp`` (J).

    (Delta / 4 hbar Omega^3) T [[-D(1 - e^{-i p}), E(1 + e^{i p})],
                                [E(1 + e^{-i p}),  D(1 - e^{i p})]]
    with p the gauge-invariant phase difference.  Zero temperature.
    """
    q = _wavevector(mode)
    e, om = quasiparticle_energy(np.linalg.norm(q, axis=-1), material)
    gap = material.gap
    ph = np.exp(1j * phase_diff)
    phc = np.conj(ph)
    e = np.asarray(e, dtype=float)
    body = np.empty(e.shape + (2, 2), dtype=complex)
    body[..., 0, 0] = -gap * (1 - phc)
    body[..., 0, 1] = e * (1 + ph)
    body[..., 1, 0] = e * (1 + phc)
    body[..., 1, 1] = gap * (1 - ph)
    pref = gap * t_amp / (4 * material.hbar * np.asarray(om) ** 3)
    return NambuMatrix(pref[..., None, None] * body)


def occupation_from_g(mode, vs, material):
    """n_q = -hbar [G0 + delta G_vs]_11 at time difference 0^-."""
    q = _wavevector(mode)
    vs = _check_velocity(vs, material)
    g = g0(np.linalg.norm(q, axis=-1), -0.0, material) + delta_g_vs(q, vs, material)
    return -material.hbar * g[0, 0].real


def doppler_shifted_g0(mode, vs, material, tau=-0.0):
    """Exact (all orders) G0 evaluated at the shifted wavevector q - m v_s / hbar."""
    q = _wavevector(mode)
    k = q - material.electron_mass * np.asarray(vs, dtype=float) / material.hbar
    return g0(np.linalg.norm(k, axis=-1), tau, material)


# -- impurity scattering --------------------------------------------------------

@dataclass(frozen=True)
class ImpurityEnsemble:
    """Point impurities U(r) = U0 sum_j delta(r - r_j) in a box sample."""

    positions: np.ndarray
    strength: float
    box: tuple
    seed: int | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        box = tuple(float(b) for b in self.box)
        if len(box) != 3 or min(box) <= 0:
            raise DomainError("box must be three positive lengths")
        if np.any(pos < 0) or np.any(pos > np.asarray(box)):
            raise DomainError("impurity positions must lie inside the sample box")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "box", box)

    @classmethod
    def random(cls, count, box, strength, seed=0):
        rng = np.random.default_rng(seed)
        pos = rng.uniform(0.0, 1.0, size=(count, 3)) * np.asarray(box, dtype=float)
        return cls(pos, float(strength), tuple(box), seed)

    @property
    def volume(self):
        return float(np.prod(self.box))

    def matrix_element(self, q, q2):
        """<q|U|q2> = (U0 / V) sum_j exp(i (q - q2) . r_j) for box-normalised plane waves."""
        dq = np.asarray(q, dtype=float) - np.asarray(q2, dtype=float)
        phases = np.exp(1j * (dq @ self.positions.T))
        return self.strength / self.volume * phases.sum(axis=-1)


@dataclass
class TauKernel:
    """Piecewise imaginary-time function of one mode.

    value(t) = exp(-rate |t|/hbar) * sum_p terms[p] (|t|/hbar)^p, with separate
    term lists for t > 0 (``pos``) and t < 0 (``neg``).  Each term is a
    stack of 2x2 matrices (one per mode).
    """

    rate: np.ndarray
    pos: dict = field(default_factory=dict)
    neg: dict = field(default_factory=dict)


def g0_kernel(e, om, material):
    """G0 as a :class:`TauKernel`."""
    x, _ = _projector_parts(e, om, material.gap)
    hb = material.hbar
    return TauKernel(np.asarray(om, dtype=float),
                     pos={0: (IDENTITY + x) / (2 * hb)},
                     neg={0: -(IDENTITY - x) / (2 * hb)})


def g0_energy_derivative_kernel(e, om, material):
    """d G0 / dE as a :class:`TauKernel` (the decay rate also depends on E)."""
    x, dx = _projector_parts(e, om, material.gap)
    hb = material.hbar
    slope = (np.asarray(e) / np.asarray(om))[..., None, None]
    return TauKernel(np.asarray(om, dtype=float),
                     pos={0: dx / (2 * hb), 1: -slope * (IDENTITY + x) / (2 * hb)},
                     neg={0: dx / (2 * hb), 1: slope * (IDENTITY - x) / (2 * hb)})


def dyson_equal_time(a: TauKernel, vertex, b: TauKernel, hbar):
    """Equal-time (difference 0^-) value of int dtau1 A(0 - tau1) V B(tau1 - 0^+).

    tau1 < 0 pairs A's positive-time branch with B's negative-time branch and
    tau1 > 0 the reverse; each piece integrates to
    hbar p! / (rate_a + rate_b)^(p+1) with p the summed polynomial degree.
    ``vertex`` is a scalar (per mode) or a stack of 2x2 matrices.
    """
    total = a.rate + b.rate
    v = np.asarray(vertex)
    if v.ndim == 0 or v.shape[-2:] != (2, 2):
        v = v[..., None, None] * IDENTITY
    out = 0
    for left, right in ((a.pos, b.neg), (a.neg, b.pos)):
        for pa, ma in left.items():
            for pb, mb in right.items():
                p = pa + pb
                factor = hbar * math.factorial(p) / total ** (p + 1)
                out = out + factor[..., None, None] * (ma @ v @ mb)
    return out


@dataclass(frozen=True)
class ImpurityResidual:
    """Outcome of :func:`impurity_first_order_residual`."""

    residual: float
    zeroth_order: float
    first_order: float
    max_delta_n: float
    modes: int
    max_energy_spacing: float


def impurity_first_order_residual(grid: FermiShellGrid, ens: ImpurityEnsemble,
                                  branches: BranchPair, material, *,
                                  max_spacing=0.1):
    """First-order impurity corrections to delta n_q, relative to max |delta n_q|.

    For every grid mode the branch propagator is G0 + dE_b dG0/dE with
    dE_b = -hbar q.v_b.  The first Dyson term G U G at equal times splits into
    a zeroth-order piece G0 U G0 and a first-order piece
    dE_b (G0 U G' + G' U G0); the impurity potential is a scalar in Nambu
    space.  Returns the larger of the two occupation corrections,
    max over modes, divided by max |delta n_q|.
    """
    branches.validate(material)
    if grid.max_energy_spacing >= max_spacing:
        need = energy_nodes_for_spacing(max_spacing, grid.window)
        raise ResolutionError(
            f"energy spacing {grid.max_energy_spacing:.3g} Delta does not resolve the "
            f"gap (need < {max_spacing} Delta); use n_energy >= {need}")
    dv = np.asarray(branches.delta_vs)
    axis = dv if np.linalg.norm(dv) > 0 else (0.0, 0.0, 1.0)
    q, _ = grid.wavevectors(material, axis=axis)
    e, om = quasiparticle_energy(np.linalg.norm(q, axis=1), material)
    hb = material.hbar

    u_diag = ens.matrix_element(q, q)
    base = g0_kernel(e, om, material)
    slope = g0_energy_derivative_kernel(e, om, material)
    zeroth = dyson_equal_time(base, u_diag, base, hb)
    first = (dyson_equal_time(base, u_diag, slope, hb)
             + dyson_equal_time(slope, u_diag, base, hb))

    de_left = -hb * (q @ np.asarray(branches.v_left))
    de_right = -hb * (q @ np.asarray(branches.v_right))
    corr0 = np.abs(-hb * zeroth[:, 0, 0])
    corr1 = np.abs(-hb * (de_left - de_right) * first[:, 0, 0])

    delta_n = 0.5 * material.gap**2 / om**3 * hb * (q @ dv)
    scale = float(np.max(np.abs(delta_n)))
    c0, c1 = float(np.max(corr0)), float(np.max(corr1))
    if scale == 0.0:
        residual = 0.0 if max(c0, c1) == 0.0 else math.inf
    else:
        residual = max(c0, c1) / scale
    return ImpurityResidual(residual, c0 / scale if scale else c0,
                            c1 / scale if scale else c1, scale, q.shape[0],
                            grid.max_energy_spacing)


def impurity_grid(n_energy, n_cos=16, n_phi=4, window=20.0):
    """Gauss-Legendre shell grid used by the impurity cancellation study."""
    return fermi_shell_grid(n_energy, n_cos, window=window, n_phi=n_phi)
