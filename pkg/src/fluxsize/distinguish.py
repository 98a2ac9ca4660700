"""Branch distinguishability by n-mode occupation measurements.

The exact oracle treats each branch as a product of independent two-level
(empty/occupied) mode distributions and enumerates all 2^n occupation
patterns; the linearized forms are the first-order bounds used for large
systems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, DomainError, IndistinguishableBranchesError

MAX_EXACT_MODES = 20


class Probability(NamedTuple):
    value: float
    saturated: bool


@dataclass(frozen=True)
class ModeEnsembleSpec:
    """Mode occupations of the two branches, explicit or summarized.

    Give ``occupations_a``/``occupations_b`` for small explicit systems, or
    ``n_modes`` with ``delta_n_tot`` for large ones.
    """

    n_modes: int
    delta_n_tot: float
    precision: float = 0.1
    occupations_a: tuple | None = None
    occupations_b: tuple | None = None

    def __post_init__(self):
        if not 0 < self.precision < 0.5:
            raise DomainError("precision must lie in (0, 1/2)")
        if self.occupations_a is not None or self.occupations_b is not None:
            a = np.asarray(self.occupations_a, dtype=float)
            b = np.asarray(self.occupations_b, dtype=float)
            if a.shape != b.shape or a.ndim != 1:
                raise DomainError("occupation lists must be 1-D and equal length")
            if np.any((a < 0) | (a > 1) | (b < 0) | (b > 1)):
                raise DomainError("occupations must lie in [0, 1]")
            total = float(np.sum(np.abs(a - b)))
            if not math.isclose(total, self.delta_n_tot, rel_tol=1e-9, abs_tol=1e-12):
                raise DomainError(f"delta_n_tot={self.delta_n_tot} but occupations give {total}")
            object.__setattr__(self, "occupations_a", tuple(a))
            object.__setattr__(self, "occupations_b", tuple(b))
        if self.n_modes < 0 or self.delta_n_tot < 0:
            raise DomainError("n_modes and delta_n_tot must be >= 0")

    @classmethod
    def explicit(cls, occupations_a, occupations_b, precision=0.1):
        a = np.asarray(occupations_a, dtype=float)
        b = np.asarray(occupations_b, dtype=float)
        return cls(a.size, float(np.sum(np.abs(a - b))), precision, tuple(a), tuple(b))


def _capped(p):
    return Probability(min(p, 1.0), p > 1.0)


def p_n_linearized(selected_deltas) -> Probability:
    """P_n = 1/2 + sum |delta n_i| / 2, capped at 1."""
    d = np.abs(np.asarray(selected_deltas, dtype=float))
    if np.any(d > 1):
        raise DomainError("|delta n| must be <= 1")
    return _capped(0.5 + 0.5 * float(np.sum(d)))


def p_n_average(n, n_modes, delta_n_tot) -> Probability:
    """Mean over all n-subsets of N modes: 1/2 + n Delta N_tot / 2N, capped at 1."""
    if n < 0 or n > n_modes:
        raise DomainError(f"need 0 <= n <= N, got n={n}, N={n_modes}")
    if n_modes == 0:
        return Probability(0.5, False)
    return _capped(0.5 + n * delta_n_tot / (2 * n_modes))


def n_min_and_size(spec: ModeEnsembleSpec):
    """Smallest n with mean success probability >= 1 - delta, and N / n_min.

    n_min = ceil((1 - 2 delta) N / Delta N_tot); the ceiling is taken on the
    exact inequality so integer ratios are not pushed up by round-off.
    """
    if spec.delta_n_tot <= 0:
        raise IndistinguishableBranchesError("Delta N_tot = 0: branches cannot be distinguished")
    target = 1.0 - spec.precision
    n = max(1, math.ceil((1 - 2 * spec.precision) * spec.n_modes / spec.delta_n_tot))
    n = min(n, spec.n_modes) if spec.n_modes else n
    while n > 1 and 0.5 + (n - 1) * spec.delta_n_tot / (2 * spec.n_modes) >= target:
        n -= 1
    return n, spec.n_modes / n


def _product_distribution(occ):
    """Probabilities of all 2^n occupation patterns (bit i set = mode i occupied)."""
    probs = np.ones(1)
    for p in occ:
        probs = np.concatenate([probs * (1 - p), probs * p])
    return probs


def exact_trace_distance_oracle(spec: ModeEnsembleSpec, selection=None) -> float:
    """Exact 1/2 + (1/4) sum_s |P_A(s) - P_B(s)| over the selected modes."""
    if spec.occupations_a is None:
        raise DomainError("exact oracle needs explicit occupations")
    a = np.asarray(spec.occupations_a)
    b = np.asarray(spec.occupations_b)
    idx = np.arange(a.size) if selection is None else np.asarray(selection, dtype=int)
    if idx.size > MAX_EXACT_MODES:
        raise CapacityError(f"{idx.size} modes exceed the {MAX_EXACT_MODES}-mode enumeration limit")
    pa = _product_distribution(a[idx])
    pb = _product_distribution(b[idx])
    return 0.5 + 0.25 * float(np.sum(np.abs(pa - pb)))


def first_order_trace_distance(spec: ModeEnsembleSpec, selection=None) -> float:
    """1/2 + (1/4) || first-order expansion of rho_A - rho_B ||_1.

    The expansion keeps one differing mode at a time, weighted by the
    branch-B distribution of the others (B as reference).
    """
    a = np.asarray(spec.occupations_a)
    b = np.asarray(spec.occupations_b)
    idx = np.arange(a.size) if selection is None else np.asarray(selection, dtype=int)
    if idx.size > MAX_EXACT_MODES:
        raise CapacityError(f"{idx.size} modes exceed the {MAX_EXACT_MODES}-mode enumeration limit")
    a, b = a[idx], b[idx]
    diff = np.zeros(2 ** idx.size)
    for i in range(idx.size):
        occ = b.copy()
        factors = [np.array([1 - x, x]) for x in occ]
        factors[i] = np.array([-(a[i] - b[i]), a[i] - b[i]])
        term = np.ones(1)
        for f in factors:
            term = np.concatenate([term * f[0], term * f[1]])
        diff += term
    return 0.5 + 0.25 * float(np.sum(np.abs(diff)))


# -- basis optimality ---------------------------------------------------------

def haar_unitaries(dim, count, rng):
    """``count`` Haar-random dim x dim unitaries (QR of complex Ginibre matrices)."""
    z = (rng.standard_normal((count, dim, dim))
         + 1j * rng.standard_normal((count, dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def random_hermitian(dim, rng, scale=1.0):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (z + z.conj().T) / 2


@dataclass(frozen=True)
class BasisOptimalityReport:
    eigen_sum: float
    max_trial_sum: float
    original_sum: float
    trials: int
    violations: int


def basis_optimality_check(d_matrix, trials=100, seed=0, *, rtol=1e-12):
    """Compare sum |eig(D)| with sum |diag(U^dag D U)| over random unitaries U.

    A violation is a trial sum exceeding the eigenvalue sum by more than
    ``rtol`` relative (round-off allowance).
    """
    d = np.asarray(d_matrix, dtype=complex)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DomainError("D must be square")
    if d.shape[0] > 64:
        raise CapacityError("D dimension above 64")
    if not np.allclose(d, d.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(d).max())):
        raise DomainError("D must be Hermitian")
    eig = float(np.sum(np.abs(np.linalg.eigvalsh(d))))
    rng = np.random.default_rng(seed)
    u = haar_unitaries(d.shape[0], trials, rng)
    rotated = np.einsum("tji,jk,tkl->til", u.conj(), d, u)
    sums = np.sum(np.abs(np.diagonal(rotated, axis1=-2, axis2=-1).real), axis=-1)
    violations = int(np.sum(sums > eig * (1 + rtol) + 1e-300))
    return BasisOptimalityReport(eig, float(sums.max()) if trials else 0.0,
                                 float(np.sum(np.abs(np.diag(d).real))), trials, violations)
