"""Partition functions ``Z_{k1/k2} / Z_{0/0}`` by the determinant and Pfaffian
factorisations, and k-point correlation functions.

Everything is assembled from normalised averages of at most two flavours
over ``m`` eigenvalues (the "hatted" blocks below), expressed through monic
orthogonal polynomials ``p_j`` and Cauchy transforms ``p^_j``:

    E_m[prod (y - u)]                        = (-1)^m p_m(u)
    E_m[prod 1/(y - u)]                      = (-1)^(m-1) p^_{m-1}(u) / h_{m-1}
    E_m[prod (y - u)(y - v)]                 = h_m K_{m+1}(u, v)
    E_m[prod (y - f)/(y - e)]                = [p^_m(e) p_{m-1}(f) - p^_{m-1}(e) p_m(f)] / h_{m-1}
    E_m[prod 1/((y - e1)(y - e2))]           = [p^_{m-2}(e1) p^_{m-1}(e2) - p^_{m-1}(e1) p^_{m-2}(e2)]
                                               / (h_{m-1} h_{m-2} (e1 - e2))

with ``K_m`` the Christoffel-Darboux kernel.  For the chiral ensemble
``u = kappa**2`` and each flavour contributes an extra zero-mode factor
``(-i kappa)**(+-nu)``; since every flavour enters each term of a
determinant or Pfaffian exactly once, these factors are pulled out front.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .ensemble import EnsembleParams, Measure
from .errors import AssemblyError, ConsistencyError, DimensionError, DomainError, UnsupportedError
from .flavors import DetSplit, FlavorSet, PartitionResult, check_distinct, valid_splits
from .linalg import berezinian_sqrt, determinant, pfaffian
from .oracles import chiral_prefactor
from .polynomials import OrthogonalSystem, build_measure_system, build_orthogonal_system

ANTISYM_TOL = 1e-9
PF_IDENTITY_TOL = 1e-8


@lru_cache(maxsize=64)
def system_for(params: EnsembleParams, J: int) -> OrthogonalSystem:
    return build_orthogonal_system(params, J)


def _required_degree(n: int, k1: int, k2: int) -> int:
    return n + k1 + k2 + 2


class Blocks:
    """One- and two-flavour averages over ``m`` eigenvalues, in the variable ``u``.

    Cauchy transforms are computed once per distinct argument and cached.
    """

    def __init__(self, sys: OrthogonalSystem):
        self.sys = sys
        self._hat: dict[complex, np.ndarray] = {}

    def h(self, j: int) -> float:
        return self.sys.h(j)

    def p(self, j: int, u: complex) -> complex:
        return complex(self.sys.evaluate(complex(u), j)[j])

    def phat(self, j: int, u: complex) -> complex:
        u = complex(u)
        arr = self._hat.get(u)
        if arr is None:
            arr = self.sys.cauchy_all(u, self.sys.J + 1)
            self._hat[u] = arr
        if j > arr.size - 1:
            raise DomainError(f"Cauchy transform degree {j} beyond the built system")
        return complex(arr[j])

    def z01(self, m: int, u) -> complex:
        return (-1) ** m * self.p(m, u)

    def z10(self, m: int, u) -> complex:
        if m == 0:
            return 1.0 + 0j
        return (-1) ** (m - 1) * self.phat(m - 1, u) / self.h(m - 1)

    def k(self, m: int, u, v) -> complex:
        """Christoffel-Darboux kernel ``K_m(u, v)``; ``E_m[(y-u)(y-v)] = h_m K_{m+1}``."""
        return complex(self.sys.kernel(m, complex(u), complex(v)))

    def z02(self, m: int, u, v) -> complex:
        if m < 0:
            return 0j
        return self.h(m) * self.k(m + 1, u, v)

    def z11(self, m: int, e, f) -> complex:
        if m == 0:
            return 1.0 + 0j
        return (self.phat(m, e) * self.p(m - 1, f) - self.phat(m - 1, e) * self.p(m, f)) / self.h(m - 1)

    def z20(self, m: int, e1, e2) -> complex:
        if m == 0:
            return 1.0 + 0j
        if m == 1:
            return (self.phat(0, e1) - self.phat(0, e2)) / (self.h(0) * (e1 - e2))
        num = self.phat(m - 2, e1) * self.phat(m - 1, e2) - self.phat(m - 1, e1) * self.phat(m - 2, e2)
        return num / (self.h(m - 1) * self.h(m - 2) * (e1 - e2))


def z_building_blocks(sys: OrthogonalSystem, m: int, a: complex, b: complex) -> dict:
    """Chiral one- and two-flavour ratios at size ``m``.

    ``a`` is the first and ``b`` the second flavour argument.  ``z11`` treats
    ``a`` as bosonic and ``b`` as fermionic.
    """
    if m > sys.J:
        raise DomainError(f"size {m} exceeds the built system degree {sys.J}")
    bl = Blocks(sys)
    nu = sys.nu
    a, b = complex(a), complex(b)
    ua, ub = a * a, b * b
    za = (-1j * a) ** nu
    zb = (-1j * b) ** nu
    return {
        "z01": za * bl.z01(m, ua),
        "z10": bl.z10(m, ua) / za,
        "z02": za * zb * bl.z02(m, ua, ub),
        "z20": bl.z20(m, ua, ub) / (za * zb),
        "z11": zb / za * bl.z11(m, ua, ub),
    }


# ------------------------------------------------------------ determinant form

def _eps(m: int) -> int:
    return -1 if (m * (m - 1) // 2) % 2 else 1


def _h_ratio(bl: Blocks, top: int, n: int) -> float:
    # prod_{j<top} h_j / prod_{j<n} h_j
    out = 1.0
    for j in range(min(top, n), max(top, n)):
        out *= bl.h(j)
    return out if top >= n else 1.0 / out


def _parity(k: int) -> int:
    return -1 if k % 2 else 1


def _det_sign(n: int, k1: int, k2: int, l11: int, l21: int) -> int:
    """Sign collected while turning the split integrand into the reduced determinant."""
    l12, l22 = k1 - l11, k2 - l21
    d1 = n + l21 - l11
    # each group is a Cauchy-Vandermonde determinant with p bosons and m = q + n columns
    cauchy = lambda p, m: _parity(p * m - p * (p + 1) // 2)
    # Vandermonde orientation used by berezinian_sqrt
    orient = _eps(l11) * _eps(l21) * _eps(l12) * _eps(l22)
    # Andreief with fixed columns, then moving the d1 x d1 norm block to the corner
    andreief = _parity(n * l22 + d1 * (l11 + l21 + l12))
    return _parity(n * k1) * cauchy(l11, l21 + n) * cauchy(l12, l22 + n) * orient * andreief


def det_hat(bl: Blocks, n: int, ub: Sequence[complex], uf: Sequence[complex], split: DetSplit) -> complex:
    """Normalised average of ``prod (y - uf) / prod (y - ub)`` by the split determinant.

    Rows are the bosons of group 1 followed by the fermions of group 2;
    columns are the fermions of group 1, the bosons of group 2 and the
    degrees ``j = d1 .. d2 - 1``.  The border entries ``-p^_j(e)`` and
    ``p_j(f)`` equal ``-(-1)^j h_j Z10^(j+1)`` and ``(-1)^j Z01^(j)``.
    """
    k1, k2 = len(ub), len(uf)
    d1, d2 = split.validate(n, k1, k2)
    l11, l21 = split.l11, split.l21
    b1, b2 = list(ub[:l11]), list(ub[l11:])
    f1, f2 = list(uf[:l21]), list(uf[l21:])
    check_distinct(list(ub) + list(uf), "squared flavour arguments")
    border = range(d1, d2)
    rows = []
    for e in b1:
        rows.append([bl.z11(d1, e, f) / (e - f) for f in f1]
                    + [bl.h(d1) * bl.z20(d1 + 1, e, e2) for e2 in b2]
                    + [-bl.phat(j, e) for j in border])
    for g in f2:
        rows.append([-bl.k(d1, g, f) for f in f1]
                    + [bl.z11(d1, e2, g) / (e2 - g) for e2 in b2]
                    + [bl.p(j, g) for j in border])
    mat = np.array(rows, dtype=complex).reshape(len(rows), len(rows))
    pref = _det_sign(n, k1, k2, l11, l21) * _h_ratio(bl, d1, n)
    pref /= berezinian_sqrt(b1, f1) * berezinian_sqrt(b2, f2)
    return pref * determinant(mat)


# ------------------------------------------------------------ Pfaffian form

def pf_matrix(bl: Blocks, n: int, rb: Sequence[complex], rf: Sequence[complex]) -> np.ndarray:
    """Antisymmetric kernel matrix; rows are fermions, then (odd case) the border, then bosons."""
    k1, k2 = len(rb), len(rf)
    ub = [r * r for r in rb]
    uf = [r * r for r in rf]
    odd = (k1 + k2) % 2
    d = 2 * n + k2 - k1
    if d < odd:
        raise UnsupportedError(f"Pfaffian formula needs 2n + k2 - k1 >= {odd}, got {d}")
    if odd:
        d += 1  # an extra fermion sent to infinity
    half = d // 2
    size = k1 + k2 + odd
    m = np.zeros((size, size), complex)
    s_ff, s_fb, s_bb = _eps(half - 1), _eps(half), _eps(half + 1)
    for a in range(k2):
        for b in range(a + 1, k2):
            m[a, b] = s_ff * (rf[b] - rf[a]) * bl.k(half, uf[a], uf[b])
    if odd:
        e = k2
        for a in range(k2):
            m[a, e] = s_ff * bl.z01(half - 1, uf[a]) / bl.h(half - 1)
        for b in range(k1):
            m[e, e + 1 + b] = -s_fb * bl.z10(half, ub[b])
    off = k2 + odd
    for a in range(k2):
        for b in range(k1):
            m[a, off + b] = s_fb * bl.z11(half, ub[b], uf[a]) / (rf[a] - rb[b])
    for a in range(k1):
        for b in range(a + 1, k1):
            m[off + a, off + b] = s_bb * bl.h(half) * (rb[a] - rb[b]) * bl.z20(half + 1, ub[a], ub[b])
    return m - m.T


def _pf_sign(n: int, k1: int, k2: int) -> int:
    """Global sign of the Pfaffian formula with the entry conventions of :func:`pf_matrix`."""
    odd = (k1 + k2) % 2
    half = (2 * n + k2 - k1 + odd) // 2
    pairs = (k1 + k2 + odd) // 2
    if odd:
        base = (-1) ** (((k2 + 1) * (k2 + 2) // 2 + n + k2 - k1 + half - 1) % 2)
    else:
        base = (-1) ** (k2 * (k2 + 1) // 2 % 2)
    return _eps(n) * base * _eps(n + k1) ** (pairs - 1) * _eps(pairs - 1)


def pf_hat(bl: Blocks, n: int, rb: Sequence[complex], rf: Sequence[complex]) -> complex:
    """Normalised average by the Pfaffian formula; ``rb, rf`` are the square roots of ``u``."""
    k1, k2 = len(rb), len(rf)
    m = pf_matrix(bl, n, rb, rf)
    dev = np.max(np.abs(m + m.T)) if m.size else 0.0
    if dev > ANTISYM_TOL * max(np.max(np.abs(m)) if m.size else 0.0, 1e-300):
        raise AssemblyError(f"kernel matrix is not antisymmetric ({dev:.3e})")
    half = (2 * n + k2 - k1 + (k1 + k2) % 2) // 2
    pref = _pf_sign(n, k1, k2) * _h_ratio(bl, half, n) / berezinian_sqrt(rb, rf)
    return pref * pfaffian(m)


# ------------------------------------------------------------ public routes

def _chiral_setup(params: EnsembleParams, flavors: FlavorSet, sys: OrthogonalSystem | None):
    flavors.require_offaxis_bosons()
    need = _required_degree(params.n, flavors.k1, flavors.k2)
    if sys is None:
        sys = system_for(params, need)
    elif sys.J < need - 1:
        raise DomainError(f"system built to degree {sys.J}, need {need - 1}")
    return Blocks(sys), chiral_prefactor(flavors, params.nu)


def partition_det(sys: OrthogonalSystem | None, params: EnsembleParams, flavors: FlavorSet,
                  split: DetSplit | None = None) -> PartitionResult:
    """``Z_{k1/k2}/Z_{0/0}`` by the split determinant; default split puts everything in group 2."""
    bl, pref = _chiral_setup(params, flavors, sys)
    if split is None:
        split = valid_splits(params.n, flavors.k1, flavors.k2)[0]
    ub = [k * k for k in flavors.bosonic]
    uf = [k * k for k in flavors.fermionic]
    val = pref * det_hat(bl, params.n, ub, uf, split)
    return PartitionResult(complex(val), "det", info={"split": [split.l11, split.l21]})


def partition_pf(sys: OrthogonalSystem | None, params: EnsembleParams, flavors: FlavorSet) -> PartitionResult:
    bl, pref = _chiral_setup(params, flavors, sys)
    val = pref * pf_hat(bl, params.n, list(flavors.bosonic), list(flavors.fermionic))
    return PartitionResult(complex(val), "pfaffian")


def _principal_sqrt(k: complex) -> complex:
    k = complex(k)
    if k.imag == 0 and k.real < 0:
        raise DomainError(f"{k} lies on the branch cut of the square root")
    return complex(np.sqrt(k))


@lru_cache(maxsize=32)
def _measure_system(measure: Measure, J: int) -> OrthogonalSystem:
    return build_measure_system(measure, J)


def partition_generic_pf(measure: Measure, N: int, flavors: FlavorSet) -> PartitionResult:
    """Normalised average of ``prod (z - kappa_f)/prod (z - kappa_b)`` for a real-line measure.

    The Pfaffian is built on the principal square roots of the flavour
    arguments, which play the role that ``kappa`` plays in the chiral case.
    """
    if measure.domain != "full" or measure.squared:
        raise UnsupportedError("generic route expects a real-line measure in its own variable")
    flavors.require_offaxis_bosons()
    rb = [_principal_sqrt(k) for k in flavors.bosonic]
    rf = [_principal_sqrt(k) for k in flavors.fermionic]
    check_distinct(rb + rf, "square-root flavour arguments")
    sys = _measure_system(measure, _required_degree(N, flavors.k1, flavors.k2))
    val = pf_hat(Blocks(sys), N, rb, rf)
    return PartitionResult(complex(val), "generic_pfaffian")


def partition_generic_det(measure: Measure, N: int, flavors: FlavorSet, split: DetSplit | None = None) -> PartitionResult:
    """Same average by the determinant formula (no square roots needed)."""
    flavors.require_offaxis_bosons()
    sys = _measure_system(measure, _required_degree(N, flavors.k1, flavors.k2))
    if split is None:
        split = valid_splits(N, flavors.k1, flavors.k2)[0]
    val = det_hat(Blocks(sys), N, list(flavors.bosonic), list(flavors.fermionic), split)
    return PartitionResult(complex(val), "det", info={"split": [split.l11, split.l21]})


# ------------------------------------------------------------ k-point functions

def _kpoint_args(sys, params, x, k):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = x.size if k is None else k
    if x.size != k:
        raise DimensionError(f"expected {k} points, got {x.size}")
    if k < 1 or k > params.n:
        raise DimensionError(f"need 1 <= k <= n, got k = {k}, n = {params.n}")
    if np.any(x <= 0):
        raise DomainError("k-point arguments must be positive")
    check_distinct(x, "k-point arguments")
    if sys is None:
        sys = system_for(params, params.n + 1)
    return Blocks(sys), x, k


def _z02_matrix(bl: Blocks, params: EnsembleParams, xa, xb) -> np.ndarray:
    """``Z_{0/2}^{(n-1)}(x_a, x_b) / Z_{0/0}`` including the zero-mode factors."""
    n, nu = params.n, params.nu
    out = np.empty((xa.size, xb.size), complex)
    for i, a in enumerate(xa):
        for j, b in enumerate(xb):
            out[i, j] = (-1j * a) ** nu * (-1j * b) ** nu * bl.z02(n - 1, a * a, b * b)
    return out


def kpoint_det(sys, params: EnsembleParams, x, k: int | None = None) -> float:
    """``R_k`` as a determinant of two-flavour ratios at ``(x_a, -x_b)``; ``int R_1 = n``."""
    bl, x, k = _kpoint_args(sys, params, x, k)
    z = _z02_matrix(bl, params, x, -x)
    g = np.sqrt(x) * np.exp(-0.5 * params.alpha * params.V(x * x))
    mat = g[:, None] * g[None, :] * z / bl.h(params.n - 1)
    return float(determinant(mat).real)


def kpoint_pf(sys, params: EnsembleParams, x, k: int | None = None) -> float:
    """``R_k`` from the ``2k x 2k`` Pfaffian; checks the squared identity internally."""
    bl, x, k = _kpoint_args(sys, params, x, k)
    z = _z02_matrix(bl, params, x, x)
    dif = x[:, None] - x[None, :]
    sm = x[:, None] + x[None, :]
    big = np.block([[dif * z, sm * z], [-sm * z, -dif * z]])
    pf = pfaffian(big)
    rhs = 4**k * np.prod(x) ** 2 * determinant(z) ** 2
    if abs(pf * pf - rhs) > PF_IDENTITY_TOL * max(abs(rhs), 1e-300):
        raise ConsistencyError(f"squared Pfaffian identity violated: {pf * pf} vs {rhs}")
    # Pf [[0, M], [-M^T, 0]] = (-1)^(k(k-1)/2) det M
    sign = _eps(k)
    weight = np.exp(-params.alpha * np.sum(params.V(x * x)))
    val = sign * (-1) ** (params.nu * k) * weight * pf / (2**k * bl.h(params.n - 1) ** k)
    return float(val.real)


def kpoint_pf_identity_residual(sys, params: EnsembleParams, x) -> float:
    """Relative residual of ``Pf**2 = 4**k det(x)**2 det(Z)**2``."""
    bl, x, k = _kpoint_args(sys, params, x, None)
    z = _z02_matrix(bl, params, x, x)
    dif = x[:, None] - x[None, :]
    sm = x[:, None] + x[None, :]
    pf = pfaffian(np.block([[dif * z, sm * z], [-sm * z, -dif * z]]))
    rhs = 4**k * np.prod(x) ** 2 * determinant(z) ** 2
    return float(abs(pf * pf - rhs) / abs(rhs))
