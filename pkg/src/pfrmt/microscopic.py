"""Microscopic (hard-edge) limit of the chiral unitary partition functions.

With ``alpha = n`` and flavour masses scaled as ``kappa / (2n)``, the
finite-``n`` partition functions converge to Bessel-function expressions.
Everything here is written in the mass variables

    s_f = -i kappa_f                   (fermions)
    s_b = sqrt(-kappa_b**2), Re s_b > 0  (bosons)

in which the one-flavour limits are ``Z_{0/1} = I_nu(s_f)`` and
``Z_{1/0} = K_nu(s_b)``, up to the sign ``sigma_b = -i kappa_b / s_b``
raised to ``nu``.  The two-flavour building blocks are

    N_I(s, t) = s I_{nu+1}(s) I_nu(t) - t I_nu(s) I_{nu+1}(t)
    N_K(s, t) = t K_nu(s) K_{nu+1}(t) - s K_{nu+1}(s) K_nu(t)
    Z11(s_b, s_f) = s_b K_{nu+1}(s_b) I_nu(s_f) + s_f K_nu(s_b) I_{nu+1}(s_f)

and the finite-``n`` values relate to these limits through

    Z^(n)(kappa / 2n) ~ (n!/n^n)^(k2 - k1) (2n)^e Z_micro(kappa),
    e = (k1 - k2)(k1 - k2 + 1)/2.

:func:`kernel_I` exposes the three two-flavour kernels in the original
``kappa`` variables; the partition functions use the exact mass-variable
forms above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_i_orders, bessel_j, bessel_j_orders, bessel_k, bessel_k_orders
from .ensemble import EnsembleParams
from .errors import DomainError, SeparationError, UnsupportedError, ValidationError
from .flavors import DetSplit, FlavorSet, PartitionResult, check_distinct
from .linalg import berezinian_sqrt, determinant, pfaffian
from .partition import _eps, _parity, partition_pf
from .polynomials import laguerre_system

__all__ = [
    "bessel_j",
    "bessel_k",
    "kernel_I",
    "micro_partition_det",
    "micro_partition_pf",
    "micro_valid_splits",
    "scaled_finite_partition",
    "convergence_study",
    "ConvergenceRow",
]

DIAG_TOL = 1e-10


# ------------------------------------------------------------ kappa-variable kernels

def _j_pair(nu: int, z):
    """``J_{nu-1}(z), J_nu(z)`` with ``J_{-1} = -J_1``."""
    j = bessel_j_orders(nu + 1, z)
    return (j[nu - 1] if nu else -j[1]), j[nu]


def _k_pair(nu: int, z):
    """``K_{nu-1}(z), K_nu(z)`` with ``K_{-1} = K_1``."""
    k = bessel_k_orders(nu + 1, z)
    return (k[nu - 1] if nu else k[1]), k[nu]


def kernel_I(which: int, nu: int, a, b):
    """Two-flavour kernels in the ``kappa`` variables.

    ``which = 1``: ``[a J_{nu-1}(a) J_nu(b) - b J_nu(a) J_{nu-1}(b)] / (a^2 - b^2)``
    ``which = 2``: ``[a K_{nu-1}(a) J_nu(b) - b K_nu(a) J_{nu-1}(b)] / (a^2 - b^2)``
    ``which = 3``: ``[a K_{nu-1}(a) K_nu(b) - b K_nu(a) K_{nu-1}(b)] / (a^2 - b^2)``

    Kernels 1 and 3 are continued to ``a = b`` by
    ``(F_{nu+1} F_{nu-1} - F_nu^2)/2``; kernel 2 mixes two families and has
    no diagonal, so coincident arguments raise :class:`SeparationError`.
    """
    if which not in (1, 2, 3):
        raise ValidationError(f"kernel index must be 1, 2 or 3, got {which}")
    if int(nu) != nu or nu < 0:
        raise ValidationError(f"nu must be a non-negative integer, got {nu}")
    nu = int(nu)
    real = np.isrealobj(a) and np.isrealobj(b)
    a, b = complex(a), complex(b)
    first = _j_pair if which == 1 else _k_pair
    second = _k_pair if which == 3 else _j_pair
    if abs(a * a - b * b) <= DIAG_TOL * max(1.0, abs(a) ** 2):
        if which == 2:
            raise SeparationError("the mixed kernel has no coincident-argument limit")
        orders = (bessel_j_orders if which == 1 else bessel_k_orders)(nu + 1, a)
        fm = orders[nu - 1] if nu else (-orders[1] if which == 1 else orders[1])
        val = (orders[nu + 1] * fm - orders[nu] ** 2) / 2
    else:
        am, a0 = first(nu, a)
        bm, b0 = second(nu, b)
        val = (a * am * b0 - b * a0 * bm) / (a * a - b * b)
    return float(val.real) if real else complex(val)


# ------------------------------------------------------------ mass-variable blocks

def _i_vals(nu: int, s, extra: int = 1) -> np.ndarray:
    return bessel_i_orders(nu + extra, s)


def _k_vals(nu: int, s, extra: int = 1) -> np.ndarray:
    return bessel_k_orders(nu + extra, s)


def _n_i(nu: int, s, t) -> complex:
    a, b = _i_vals(nu, s), _i_vals(nu, t)
    return s * a[nu + 1] * b[nu] - t * a[nu] * b[nu + 1]


def _n_k(nu: int, s, t) -> complex:
    a, b = _k_vals(nu, s), _k_vals(nu, t)
    return t * a[nu] * b[nu + 1] - s * a[nu + 1] * b[nu]


def _z11(nu: int, sb, sf) -> complex:
    k, i = _k_vals(nu, sb), _i_vals(nu, sf)
    return sb * k[nu + 1] * i[nu] + sf * k[nu] * i[nu + 1]


def _mass_variables(flavors: FlavorSet) -> tuple[list, list, int]:
    """``s_b, s_f`` and the product of ``sigma_b = -i kappa_b / s_b``."""
    flavors.require_offaxis_bosons()
    check_distinct([k * k for k in flavors.bosonic + flavors.fermionic], "squared flavour masses")
    sf = [-1j * k for k in flavors.fermionic]
    sb, sigma = [], 1
    for k in flavors.bosonic:
        s = complex(np.sqrt(-k * k))
        if s.real < 0:
            s = -s
        sb.append(s)
        sigma *= 1 if ((-1j * k) / s).real > 0 else -1
    return sb, sf, sigma


def micro_valid_splits(k1: int, k2: int) -> list[DetSplit]:
    """Splits with ``d2 - d1 = k2 - k1 - 2(l21 - l11) >= 0``."""
    out = []
    for l11 in range(k1 + 1):
        for l21 in range(k2 + 1):
            if (k2 - l21) - (k1 - l11) - (l21 - l11) >= 0:
                out.append(DetSplit(l11, l21))
    return out


def _micro_det_sign(k1: int, k2: int, l11: int, l21: int) -> int:
    l12, l22 = k1 - l11, k2 - l21
    return _parity(k1 + l21 + l12 + l11 * l22 + l21 * l22) * _eps(l11) * _eps(l12)


def micro_partition_det(nu: int, flavors: FlavorSet, split: DetSplit | None = None) -> PartitionResult:
    """Microscopic ``Z_{k1/k2}`` by the split determinant.

    Rows are the group-1 bosons and group-2 fermions; columns are the group-1
    fermions, the group-2 bosons and ``D = d2 - d1`` border columns with
    entries ``-s^a K_{nu+a}(s)`` (bosons) and ``(-s)^a I_{nu+a}(s)`` (fermions).
    """
    _check_nu(nu)
    sb, sf, sigma = _mass_variables(flavors)
    k1, k2 = len(sb), len(sf)
    if split is None:
        split = micro_valid_splits(k1, k2)[0] if micro_valid_splits(k1, k2) else DetSplit(0, 0)
    l11, l21 = split.l11, split.l21
    if not (0 <= l11 <= k1 and 0 <= l21 <= k2):
        raise ValidationError(f"split {split} incompatible with (k1, k2) = ({k1}, {k2})")
    width = (k2 - l21) - (k1 - l11) - (l21 - l11)
    if width < 0:
        raise UnsupportedError(f"split {split} gives a negative border width {width}")
    b1, b2 = sb[:l11], sb[l11:]
    f1, f2 = sf[:l21], sf[l21:]
    rows = []
    for e in b1:
        ke = _k_vals(nu, e, width)
        rows.append([_z11(nu, e, f) / (e * e - f * f) for f in f1]
                    + [_n_k(nu, e, e2) / (e * e - e2 * e2) for e2 in b2]
                    + [-e**a * ke[nu + a] for a in range(width)])
    for g in f2:
        ig = _i_vals(nu, g, width)
        rows.append([_n_i(nu, g, f) / (g * g - f * f) for f in f1]
                    + [_z11(nu, e2, g) / (e2 * e2 - g * g) for e2 in b2]
                    + [(-g) ** a * ig[nu + a] for a in range(width)])
    size = len(rows)
    mat = np.array(rows, dtype=complex).reshape(size, size)
    sq = lambda xs: [x * x for x in xs]
    pref = _micro_det_sign(k1, k2, l11, l21) * sigma**nu
    pref /= berezinian_sqrt(sq(b1), sq(f1)) * berezinian_sqrt(sq(b2), sq(f2))
    return PartitionResult(complex(pref * determinant(mat)), "micro-det", normalization="microscopic",
                           info={"split": [l11, l21]})


def micro_pf_matrix(nu: int, sb, sf) -> np.ndarray:
    """Antisymmetric matrix; rows are fermions, then (odd case) the border, then bosons."""
    k1, k2 = len(sb), len(sf)
    odd = (k1 + k2) % 2
    size = k1 + k2 + odd
    m = np.zeros((size, size), complex)
    for a in range(k2):
        for b in range(a + 1, k2):
            m[a, b] = _n_i(nu, sf[a], sf[b]) / (sf[a] + sf[b])
    if odd:
        e = k2
        for a in range(k2):
            m[a, e] = _i_vals(nu, sf[a])[nu]
        for b in range(k1):
            m[e, e + 1 + b] = -_k_vals(nu, sb[b])[nu]
    off = k2 + odd
    for a in range(k2):
        for b in range(k1):
            m[a, off + b] = _z11(nu, sb[b], sf[a]) / (sf[a] - sb[b])
    for a in range(k1):
        for b in range(a + 1, k1):
            m[off + a, off + b] = -_n_k(nu, sb[a], sb[b]) / (sb[a] + sb[b])
    return m - m.T


def micro_partition_pf(nu: int, flavors: FlavorSet) -> PartitionResult:
    """Microscopic ``Z_{k1/k2}`` as a single Pfaffian over ``s_b, s_f``."""
    _check_nu(nu)
    sb, sf, sigma = _mass_variables(flavors)
    m = micro_pf_matrix(nu, sb, sf)
    pref = _parity(len(sb)) * sigma**nu / berezinian_sqrt(sb, sf)
    return PartitionResult(complex(pref * pfaffian(m)), "micro-pf", normalization="microscopic")


def _check_nu(nu) -> None:
    if int(nu) != nu or nu < 0:
        raise ValidationError(f"nu must be a non-negative integer, got {nu}")


# ------------------------------------------------------------ finite-n comparison

def _fermion_norm(n: int) -> float:
    return math.exp(math.lgamma(n + 1) - n * math.log(n))


def scaled_finite_partition(n: int, nu: int, flavors: FlavorSet) -> complex:
    """Finite-``n`` Laguerre partition function at ``kappa/(2n)``, rescaled to the microscopic normalisation."""
    params = EnsembleParams(n, nu, alpha=float(n))
    k1, k2 = flavors.k1, flavors.k2
    sys = laguerre_system(params, n + k1 + k2 + 3)
    scaled = FlavorSet([k / (2 * n) for k in flavors.bosonic], [k / (2 * n) for k in flavors.fermionic])
    e = (k1 - k2) * (k1 - k2 + 1) // 2
    # combine the normalisation in logs: n!/n^n underflows quickly
    log_norm = (k2 - k1) * (math.lgamma(n + 1) - n * math.log(n)) + e * math.log(2 * n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        z = partition_pf(sys, params, scaled).value
    return complex(z * math.exp(-log_norm))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    x: float
    deviation_p: float
    deviation_phat: float


def convergence_study(ns, nu: int, xs, *, pin: float = 1.0) -> list[ConvergenceRow]:
    """Deviation of the scaled ``p_n`` and ``p^_n`` from their Bessel limits.

    ``p_n(x^2/4n^2)`` is compared with ``J_nu(x)/x^nu`` and
    ``p^_n(-x^2/4n^2)`` with ``x^nu K_nu(x)``.  Both sides are normalised to
    agree at ``x = pin``, and deviations are relative to the largest
    magnitude of the target on the grid.
    """
    _check_nu(nu)
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0 or np.any(xs <= 0):
        raise DomainError("the grid must be non-empty and strictly positive")
    grid = np.concatenate([[pin], xs])
    tp = np.array([bessel_j(nu, x) / x**nu for x in grid])
    tk = np.array([x**nu * bessel_k(nu, x) for x in grid])
    rows = []
    for n in ns:
        n = int(n)
        if n < max(nu, 1):
            raise ValidationError(f"need n >= max(nu, 1), got n = {n}")
        sys = laguerre_system(EnsembleParams(n, nu, alpha=float(n)), n + 1)
        u = grid**2 / (4.0 * n * n)
        p = sys.evaluate(u, n)[n]
        phat = np.array([sys.cauchy(n, -v) for v in u]).real
        sp = p * (tp[0] / p[0])
        sk = phat * (tk[0] / phat[0])
        dp = np.abs(sp - tp)[1:] / np.max(np.abs(tp[1:]))
        dk = np.abs(sk - tk)[1:] / np.max(np.abs(tk[1:]))
        rows.extend(ConvergenceRow(n, float(x), float(a), float(b)) for x, a, b in zip(xs, dp, dk))
    return rows
