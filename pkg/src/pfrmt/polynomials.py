"""Monic orthogonal polynomials, their Cauchy transforms, and the skew-orthogonal
family built from them.

Polynomials live in ``y = x**2`` for the chiral ensemble (or ``y = x`` for a
real-line measure) and are orthogonal with respect to ``density(x) dx``.  They
are generated from three-term recurrence coefficients

    y p_j = p_{j+1} + a_j p_j + b_j p_{j-1}

obtained by the discretised Stieltjes procedure, so no Hankel moment matrix is
ever inverted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gammaln

from .ensemble import EnsembleParams, Measure
from .errors import ConditioningError, DomainError, NumericalError, UnsupportedError
from .quadrature import adaptive_rule, integrate

MAX_DEGREE = 20
CAUCHY_EPS = 1e-9


@dataclass(frozen=True)
class MonicPolynomial:
    coeffs: np.ndarray  # ascending powers, last entry 1

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0 or c[-1] != 1.0:
            raise ValueError("coefficients must be ascending with leading entry exactly 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return P.polyval(x, self.coeffs)

    def derivative(self) -> np.ndarray:
        return P.polyder(self.coeffs)

    def to_list(self) -> list:
        return self.coeffs.tolist()

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "MonicPolynomial":
        return cls(np.asarray(json.loads(text), float))


@dataclass(frozen=True)
class OrthogonalSystem:
    """Recurrence data ``a_j, b_j`` and norms ``h_j`` for ``j = 0..J``."""

    measure: Measure
    a: np.ndarray
    b: np.ndarray  # b[0] unused (0)
    norms: np.ndarray
    params: EnsembleParams | None = None
    _polys: list = field(default_factory=list, compare=False, repr=False)

    @property
    def J(self) -> int:
        return self.a.size - 1

    @property
    def nu(self) -> int:
        return self.params.nu if self.params is not None else 0

    def _check_degree(self, j: int) -> None:
        if j < 0 or j > self.J + 1:
            raise DomainError(f"degree {j} outside the built range 0..{self.J + 1}")

    def h(self, j: int) -> float:
        if not 0 <= j <= self.J:
            raise DomainError(f"norm h_{j} outside the built range 0..{self.J}")
        return float(self.norms[j])

    def evaluate(self, y, jmax: int | None = None) -> np.ndarray:
        """Stack ``[p_0(y), ..., p_jmax(y)]`` by forward recurrence (``jmax <= J + 1``)."""
        jmax = self.J + 1 if jmax is None else jmax
        self._check_degree(jmax)
        y = np.asarray(y)
        out = np.empty((jmax + 1,) + y.shape, dtype=np.result_type(y, float))
        out[0] = 1.0
        if jmax >= 1:
            out[1] = y - self.a[0]
        for j in range(1, jmax):
            out[j + 1] = (y - self.a[j]) * out[j] - self.b[j] * out[j - 1]
        return out

    def p(self, j: int, y):
        return self.evaluate(y, j)[j]

    @property
    def polys(self) -> list[MonicPolynomial]:
        if not self._polys:
            cur, prev = np.array([1.0]), np.array([0.0])
            self._polys.append(MonicPolynomial(cur))
            for j in range(self.J + 1):
                nxt = P.polysub(P.polymulx(cur) - self.a[j] * np.pad(cur, (0, 1)),
                                self.b[j] * prev if j else np.zeros(1))
                nxt[-1] = 1.0
                prev, cur = cur, nxt
                self._polys.append(MonicPolynomial(cur))
        return self._polys

    def kernel(self, m: int, u, v):
        """``K_m(u, v) = sum_{j < m} p_j(u) p_j(v) / h_j`` (zero for ``m <= 0``)."""
        if m <= 0:
            return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape) * (u * v)
        pu = self.evaluate(u, m - 1)
        pv = self.evaluate(v, m - 1)
        h = self.norms[:m].reshape((m,) + (1,) * (pu.ndim - 1))
        return np.sum(pu * pv / h, axis=0)

    def _u_of(self, x):
        return x * x if self.measure.squared else x

    def check_cauchy_domain(self, u: complex) -> None:
        u = complex(u)
        tol = CAUCHY_EPS * max(1.0, abs(u))
        if abs(u.imag) <= tol and (not self.measure.squared or u.real >= -tol):
            raise DomainError(f"Cauchy transform argument {u} lies on the support of the measure")

    def cauchy(self, j: int, u: complex, *, tol: float = 1e-13) -> complex:
        """``p^_j(u) = int p_j(y(x)) / (y(x) - u) density(x) dx`` by adaptive quadrature."""
        return complex(self.cauchy_all(u, j, tol=tol)[j])

    def cauchy_all(self, u: complex, jmax: int, *, tol: float = 1e-13) -> np.ndarray:
        """``[p^_0(u), ..., p^_jmax(u)]`` by one shared adaptive quadrature."""
        self._check_degree(jmax)
        u = complex(u)
        self.check_cauchy_domain(u)
        m = self.measure
        bps = []
        if u.real > 0 or not m.squared:
            xr = math.sqrt(u.real) if m.squared else u.real
            bps.append(m.t_of_x(xr))

        def f(x):
            y = m.y(x)
            # high degrees overflow far in the tails, where the density is zero
            with np.errstate(over="ignore", invalid="ignore"):
                vals = self.evaluate(y, jmax) / (y - u) * m.density(x)
            return np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)

        val, err = integrate(f, m.domain, scale=m.scale, tol=tol, breakpoints=bps)
        return np.asarray(val, dtype=complex)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "nu": p.nu if p else None,
            "alpha": p.alpha if p else None,
            "potential": list(p.potential) if p else None,
            "coeffs": [q.to_list() for q in self.polys[: self.J + 1]],
            "norms": self.norms.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def stieltjes(measure: Measure, J: int, *, tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recurrence coefficients ``a_0..a_J``, ``b_0..b_J`` and norms ``h_0..h_J``."""
    powers = np.arange(2 * J + 3)

    def family(x):
        y = measure.y(x)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.abs(y)[None, :] ** powers[:, None] * measure.density(x)

    rule = adaptive_rule(family, measure.domain, scale=measure.scale, tol=tol)
    y = measure.y(rule.nodes)
    w = rule.weights * measure.density(rule.nodes)
    a = np.zeros(J + 1)
    b = np.zeros(J + 1)
    h = np.zeros(J + 1)
    prev = np.zeros_like(y)
    cur = np.ones_like(y)
    for j in range(J + 1):
        h[j] = np.sum(w * cur * cur)
        if not np.isfinite(h[j]) or h[j] <= 0:
            raise ConditioningError(f"norm h_{j} lost positivity ({h[j]:.3e})")
        a[j] = np.sum(w * y * cur * cur) / h[j]
        if j:
            b[j] = h[j] / h[j - 1]
        prev, cur = cur, (y - a[j]) * cur - b[j] * prev
    return a, b, h


def build_orthogonal_system(params: EnsembleParams, J: int) -> OrthogonalSystem:
    """Monic ``p_0..p_J`` for the chiral weight, plus ``a_J, b_J`` so ``p_{J+1}`` is available."""
    if J > MAX_DEGREE:
        raise UnsupportedError(f"J = {J} exceeds the conditioning guard {MAX_DEGREE}")
    a, b, h = stieltjes(params.measure(), J)
    return OrthogonalSystem(params.measure(), a, b, h, params)


def build_measure_system(measure: Measure, J: int) -> OrthogonalSystem:
    """Orthogonal system of an arbitrary :class:`Measure` (e.g. a real-line weight)."""
    if J > MAX_DEGREE:
        raise UnsupportedError(f"J = {J} exceeds the conditioning guard {MAX_DEGREE}")
    a, b, h = stieltjes(measure, J)
    return OrthogonalSystem(measure, a, b, h, None)


def _require_gaussian(params: EnsembleParams) -> None:
    if not params.is_gaussian:
        raise UnsupportedError("Laguerre closed forms need V(y) = y")


def laguerre_norms(params: EnsembleParams, J: int) -> np.ndarray:
    """``h_j = j! Gamma(j + nu + 1) / (2 alpha**(2j + nu + 1))``, computed in logs."""
    _require_gaussian(params)
    j = np.arange(J + 1)
    logh = gammaln(j + 1) + gammaln(j + params.nu + 1) - (2 * j + params.nu + 1) * math.log(params.alpha)
    return 0.5 * np.exp(logh)


def laguerre_system(params: EnsembleParams, J: int) -> OrthogonalSystem:
    """Exact Laguerre recurrence ``a_j = (2j + nu + 1)/alpha``, ``b_j = j (j + nu)/alpha**2``.

    No degree guard: used for large-``n`` studies.
    """
    _require_gaussian(params)
    j = np.arange(J + 1, dtype=float)
    a = (2 * j + params.nu + 1) / params.alpha
    b = j * (j + params.nu) / params.alpha**2
    return OrthogonalSystem(params.measure(), a, b, laguerre_norms(params, J), params)


def laguerre_closed_form(params: EnsembleParams, j: int) -> MonicPolynomial:
    """``(-1)^j j! alpha^{-j} L_j^{(nu)}(alpha y)`` from the explicit coefficient sum."""
    _require_gaussian(params)
    nu, al = params.nu, params.alpha
    coeffs = np.empty(j + 1)
    for k in range(j + 1):
        # (-1)^{j+k} j!/k! binom(j+nu, j-k) alpha^{k-j}
        coeffs[k] = (-1) ** (j + k) * math.comb(j + nu, j - k) * math.perm(j, j - k) * al ** (k - j)
    coeffs[-1] = 1.0
    return MonicPolynomial(coeffs)


def cauchy_transform(sys: OrthogonalSystem, j: int, x: complex) -> complex:
    """``p^_j`` at the flavour argument ``x`` (i.e. at ``u = x**2`` for chiral systems)."""
    return sys.cauchy(j, sys._u_of(complex(x)))


def nu_recursion_check(sys_nu: OrthogonalSystem, sys_nup1: OrthogonalSystem, j: int, y_grid) -> float:
    """Largest deviation between ``p_j^{(nu+1)}(y)/p_j^{(nu+1)}(0)`` and its expression
    through ``p_j^{(nu)}, p_{j+1}^{(nu)}``.

    Deviations are measured against the absolute-coefficient envelope
    ``sum_k |c_k| |y|**k`` of the left-hand side, which stays meaningful at
    the zeros of the polynomial.
    """
    y = np.asarray(y_grid, dtype=float)
    if np.any(y == 0):
        raise DomainError("the grid must avoid y = 0 (the identity is divided by y)")
    pj, pj1 = sys_nu.polys[j].coeffs, sys_nu.polys[j + 1].coeffs
    dpj, dpj1 = P.polyder(pj), P.polyder(pj1)
    denom = pj[0] * P.polyval(0.0, dpj1) - pj1[0] * P.polyval(0.0, dpj)
    if abs(denom) < 1e-300:
        raise NumericalError("degenerate denominator in the topological-charge recursion")
    lhs_c = sys_nup1.polys[j].coeffs / sys_nup1.polys[j].coeffs[0]
    lhs = P.polyval(y, lhs_c)
    rhs = (pj[0] * P.polyval(y, pj1) - pj1[0] * P.polyval(y, pj)) / (y * denom)
    env = P.polyval(np.abs(y), np.abs(lhs_c))
    return float(np.max(np.abs(lhs - rhs) / env))


def skew_polynomials(sys: OrthogonalSystem, J: int) -> list[MonicPolynomial]:
    """``q_{2l}(x) = p_l(x**2)``, ``q_{2l+1}(x) = x p_l(x**2)`` for ``l = 0..J``."""
    if J > sys.J + 1:
        raise DomainError(f"system built only to degree {sys.J + 1}")
    out = []
    for l in range(J + 1):
        c = sys.polys[l].coeffs
        even = np.zeros(2 * l + 1)
        even[::2] = c
        out.append(MonicPolynomial(even))
        out.append(MonicPolynomial(np.concatenate([[0.0], even])))
    return out


def skew_product(params: EnsembleParams, f1, f2) -> float:
    """``1/2 int_0^inf [f1(x) f2(-x) - f1(-x) f2(x)] x^{2 nu} e^{-alpha V(x^2)} dx``."""
    m = params.measure()

    def integrand(x):
        return 0.5 * (f1(x) * f2(-x) - f1(-x) * f2(x)) / x

    return float(m.integrate(integrand))
