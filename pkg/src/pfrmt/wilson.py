"""Two-flavour Wilson-smeared building block and its ``N_f``-flavour Pfaffian.

The two-flavour function is

    Z2(m1, m2) = c / (m1 - m2) * int int exp(-[(s1 - i m1)^2 + (s2 - i m2)^2] / (4 a^2))
                 * F(s1, s2) ds1 ds2,
    F(s1, s2) = [s1 J_{nu-1}(s1) J_nu(s2) - s2 J_nu(s1) J_{nu-1}(s2)] / (s1 + s2),

with ``c = i (-1)^nu / (4 pi a^2)`` chosen so that ``Z2`` is real and
reduces to ``[m1 I_{nu+1}(m1) I_nu(m2) - m2 I_nu(m1) I_{nu+1}(m2)] / (m1^2 - m2^2)``
as ``a -> 0``.  The integrand is entire in both variables, so each contour
is shifted to ``s = t + i m``.  This removes the factor ``exp(m^2/4a^2)`` and
the rapid oscillation that the real-axis form carries, and leaves
Gauss-Hermite integrals in ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bessel import bessel_j_orders
from .errors import IntegrationError, SeparationError, UnsupportedError, ValidationError
from .flavors import FlavorSet
from .linalg import SEPARATION, pfaffian
from .microscopic import micro_partition_pf

DEFAULT_NODES = 48
MAX_NODES = 768
SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class WilsonParams:
    nu: int
    a_hat: float
    masses: tuple = field(default=())

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 0:
            raise ValidationError(f"nu must be a non-negative integer, got {self.nu}")
        if not (math.isfinite(self.a_hat) and self.a_hat > 0):
            raise ValidationError(f"a_hat must be positive, got {self.a_hat}")
        masses = tuple(float(m) for m in self.masses)
        if not all(math.isfinite(m) for m in masses):
            raise ValidationError("masses must be finite real numbers")
        object.__setattr__(self, "nu", int(self.nu))
        object.__setattr__(self, "masses", masses)

    @property
    def n_flavors(self) -> int:
        return len(self.masses)


@lru_cache(maxsize=16)
def _hermite(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(order)


def _orders(nu: int, z: np.ndarray) -> np.ndarray:
    """``J_{nu-2}, J_{nu-1}, J_nu, J_{nu+1}`` at every point (rows)."""
    out = np.empty((4, z.size), complex)
    for c, zc in enumerate(z):
        j = bessel_j_orders(nu + 2, zc)
        for r, order in enumerate(range(nu - 2, nu + 2)):
            out[r, c] = j[order] if order >= 0 else (-1) ** order * j[-order]
    return out


def _kernel_grid(nu: int, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """``F(s1_i, s2_j)`` with the removable singularity at ``s1 + s2 = 0`` filled in."""
    j1, j2 = _orders(nu, s1), _orders(nu, s2)
    num = (s1 * j1[1])[:, None] * j2[2][None, :] - j1[2][:, None] * (s2 * j2[1])[None, :]
    den = s1[:, None] + s2[None, :]
    near = np.abs(den) <= SINGULAR_TOL * (1 + np.abs(s1)[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    if np.any(near):
        # derivative of the numerator in s2 at s2 = -s1
        dj_nu = (j2[1] - j2[3]) / 2
        dj_num1 = (j2[0] - j2[2]) / 2
        deriv = ((s1 * j1[1])[:, None] * dj_nu[None, :] - j1[2][:, None] * j2[1][None, :]
                 - j1[2][:, None] * (s2 * dj_num1)[None, :])
        out[near] = deriv[near]
    return out


def _smeared(nu: int, a_hat: float, m1: float, m2: float, order: int) -> complex:
    x, w = _hermite(order)
    t = 2 * a_hat * x
    f = _kernel_grid(nu, t + 1j * m1, t + 1j * m2)
    return complex(w @ f @ w)


def wilson_entry(nu: int, a_hat: float, m1: float, m2: float, *, tol: float = 1e-12,
                 nodes: int = DEFAULT_NODES) -> float:
    """``(m1 - m2) Z2(m1, m2)``: the antisymmetric Pfaffian entry (finite at ``m1 = m2``)."""
    order = nodes
    prev = _smeared(nu, a_hat, m1, m2, order)
    while True:
        order *= 2
        if order > MAX_NODES:
            raise IntegrationError("Gauss-Hermite refinement did not converge")
        cur = _smeared(nu, a_hat, m1, m2, order)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300) or abs(cur) < 1e-300:
            break
        prev = cur
    return float(((-1) ** nu * 1j * cur / math.pi).real)


def z2_wilson(p: WilsonParams, m1: float, m2: float, *, tol: float = 1e-12) -> float:
    """Two-flavour smeared function ``Z2(m1, m2)`` at the ``nu`` and ``a_hat`` of ``p``.

    Coincident masses raise; the finite limit is reached through separated pairs.
    """
    m1, m2 = float(m1), float(m2)
    if not (math.isfinite(m1) and math.isfinite(m2)):
        raise ValidationError("masses must be finite real numbers")
    if abs(m1 - m2) <= SEPARATION * max(1.0, abs(m1), abs(m2)):
        raise SeparationError("Z2 is singular at m1 = m2; take a limit of separated masses")
    return wilson_entry(p.nu, p.a_hat, m1, m2, tol=tol) / (m1 - m2)


def wilson_matrix(params: WilsonParams, *, tol: float = 1e-12) -> np.ndarray:
    """``A_ij = (m_j - m_i) Z2(m_j, m_i)``."""
    m = params.masses
    nf = len(m)
    a = np.zeros((nf, nf))
    for i in range(nf):
        for j in range(i + 1, nf):
            a[i, j] = wilson_entry(params.nu, params.a_hat, m[j], m[i], tol=tol)
            a[j, i] = -a[i, j]
    return a


def _mass_vandermonde(m) -> float:
    out = 1.0
    for i in range(len(m)):
        for j in range(i + 1, len(m)):
            out *= m[j] - m[i]
    return out


def zNf_wilson(params: WilsonParams, *, tol: float = 1e-12, matrix: np.ndarray | None = None) -> float:
    """``Pf[(m_j - m_i) Z2(m_j, m_i)] / prod_{i<j} (m_j - m_i)`` for even ``N_f``."""
    nf = params.n_flavors
    if nf == 0 or nf % 2:
        raise UnsupportedError(f"the Pfaffian form needs an even, non-zero number of flavours, got {nf}")
    m = params.masses
    scale = max(1.0, max(abs(x) for x in m))
    gaps = [abs(m[i] - m[j]) for i in range(nf) for j in range(i + 1, nf)]
    if min(gaps) <= SEPARATION * scale:
        raise SeparationError("masses must be pairwise distinct")
    a = wilson_matrix(params, tol=tol) if matrix is None else matrix
    return float(np.real(pfaffian(a))) / _mass_vandermonde(m)


def continuum_value(params: WilsonParams) -> float:
    """Microscopic fermionic partition function at ``kappa = i m``."""
    flavors = FlavorSet((), [1j * x for x in params.masses])
    return float(micro_partition_pf(params.nu, flavors).value.real)


def permutation_residual(params: WilsonParams, *, seed: int = 0, trials: int = 3, tol: float = 1e-12) -> float:
    """Largest relative change of ``zNf_wilson`` under random mass permutations."""
    base = zNf_wilson(params, tol=tol)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        perm = rng.permutation(params.n_flavors)
        shuffled = WilsonParams(params.nu, params.a_hat, tuple(params.masses[i] for i in perm))
        worst = max(worst, abs(zNf_wilson(shuffled, tol=tol) - base) / max(abs(base), 1e-300))
    return worst


@dataclass(frozen=True)
class ContinuumCheck:
    a_values: tuple
    ratios: np.ndarray  # shape (len(a_values), n_configs)

    @property
    def spreads(self) -> np.ndarray:
        """Relative spread ``(max - min)/|mean|`` of the ratio across mass configurations."""
        r = self.ratios
        return (r.max(axis=1) - r.min(axis=1)) / np.abs(r.mean(axis=1))


def continuum_check(nu: int, configs, a_values=(0.2, 0.1, 0.05), *, tol: float = 1e-12) -> ContinuumCheck:
    """Ratio of the smeared ``N_f``-flavour function to its continuum limit."""
    ratios = np.empty((len(a_values), len(configs)))
    for i, a in enumerate(a_values):
        for j, masses in enumerate(configs):
            p = WilsonParams(nu, a, tuple(masses))
            ratios[i, j] = zNf_wilson(p, tol=tol) / continuum_value(p)
    return ContinuumCheck(tuple(a_values), ratios)
