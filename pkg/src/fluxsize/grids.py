"""Spherical-shell momentum grids around the Fermi surface.

Energies are stored in units of the gap, E/Delta, so one grid serves every
material.  Nodes are Gauss-Legendre in E/Delta and in cos(theta) (optionally
Gauss-Lobatto in cos(theta), which puts nodes on the poles), uniform in the
azimuth.  The polar axis is chosen per evaluation, usually along delta v_s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import DomainError


def gauss_legendre(n, a=-1.0, b=1.0):
    """Gauss-Legendre nodes/weights on [a, b], exactly antisymmetric about the midpoint."""
    x, w = legendre.leggauss(n)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    half = 0.5 * (b - a)
    return (a + b) / 2 + half * x, half * w


def gauss_lobatto(n):
    """Gauss-Lobatto-Legendre nodes/weights on [-1, 1] (endpoints included)."""
    if n < 3:
        raise DomainError("Gauss-Lobatto needs at least 3 nodes")
    coef = np.zeros(n)
    coef[-1] = 1.0  # P_{n-1}
    interior = legendre.legroots(legendre.legder(coef))
    x = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    x = 0.5 * (x - x[::-1])
    p = legendre.legval(x, coef)
    w = 2.0 / (n * (n - 1) * p**2)
    return x, 0.5 * (w + w[::-1])


@dataclass(frozen=True)
class FermiShellGrid:
    """Tensor-product grid in (E/Delta, cos theta, phi)."""

    energy: np.ndarray
    energy_weight: np.ndarray
    cos_theta: np.ndarray
    cos_weight: np.ndarray
    phi: np.ndarray
    phi_weight: np.ndarray
    window: float

    @property
    def shape(self):
        return (self.energy.size, self.cos_theta.size, self.phi.size)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def max_energy_spacing(self) -> float:
        """Largest gap between neighbouring energy nodes, in units of Delta."""
        return float(np.max(np.diff(self.energy)))

    def flat(self):
        """Flattened (E/Delta, cos theta, phi, combined weight) arrays."""
        e, c, p = np.meshgrid(self.energy, self.cos_theta, self.phi, indexing="ij")
        w = (self.energy_weight[:, None, None] * self.cos_weight[None, :, None]
             * self.phi_weight[None, None, :])
        return e.ravel(), c.ravel(), p.ravel(), w.ravel()

    def wavevectors(self, material, axis=(0.0, 0.0, 1.0)):
        """Lab-frame wavevectors (N, 3) and per-node mode densities (N,).

        The density is modes per m^3, both spins, for the cell the node
        represents: 2 d^3q/(2 pi)^3 with dq = m dE/(hbar^2 q).
        """
        e, c, p, w = self.flat()
        energy = e * material.gap
        kin = material.chemical_potential + energy
        if np.any(kin <= 0):
            raise DomainError("energy window reaches below the band bottom")
        m, hb = material.electron_mass, material.hbar
        q = np.sqrt(2 * m * kin) / hb
        s = np.sqrt(np.clip(1 - c**2, 0.0, None))
        ez, ex, ey = _frame(axis)
        vec = q[:, None] * (c[:, None] * ez + (s * np.cos(p))[:, None] * ex
                            + (s * np.sin(p))[:, None] * ey)
        density = 2 * q * m / hb**2 * material.gap * w / (2 * math.pi) ** 3
        return vec, density


def _frame(axis):
    ez = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(ez)
    ez = np.array([0.0, 0.0, 1.0]) if norm == 0 else ez / norm
    trial = np.array([1.0, 0.0, 0.0]) if abs(ez[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    ex = trial - ez * (trial @ ez)
    ex /= np.linalg.norm(ex)
    return ez, ex, np.cross(ez, ex)


def fermi_shell_grid(n_energy=201, n_cos=16, *, window=20.0, n_phi=1,
                     cos_rule="legendre"):
    """Build a :class:`FermiShellGrid` spanning E in [-window, window] Delta."""
    if n_energy < 8 or n_cos < 3:
        raise DomainError("need n_energy >= 8 and n_cos >= 3")
    if window < 10:
        raise DomainError("energy window must be at least 10 Delta")
    if n_phi < 1:
        raise DomainError("n_phi must be >= 1")
    e, we = gauss_legendre(n_energy, -window, window)
    if cos_rule == "legendre":
        c, wc = gauss_legendre(n_cos)
    elif cos_rule == "lobatto":
        c, wc = gauss_lobatto(n_cos)
    else:
        raise DomainError(f"unknown cos_rule {cos_rule!r}")
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    wphi = np.full(n_phi, 2 * math.pi / n_phi)
    return FermiShellGrid(e, we, c, wc, phi, wphi, float(window))


def energy_nodes_for_spacing(spacing, window=20.0):
    """Smallest Gauss-Legendre node count whose largest energy gap is below ``spacing`` (Delta)."""
    n = max(8, int(math.pi * window / spacing) - 2)
    while np.max(np.diff(gauss_legendre(n, -window, window)[0])) >= spacing:
        n += 1
    return n
