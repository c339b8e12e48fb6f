"""Chiral unitary ensemble: parameters, eigenvalue weights and moment matrices.

The singular values ``lambda >= 0`` of the ``n x (n + nu)`` block ``W`` carry
the radial weight ``lambda**(2 nu + 1) * exp(-alpha V(lambda**2))`` and the
squared Vandermonde ``Delta_n(lambda**2)**2``.  The potential is a polynomial
in ``y = lambda**2`` given by its coefficients from ``y**1`` upward (the
constant term only rescales the measure and is never needed).

:class:`Measure` is the common currency of the polynomial and partition
modules: an integration variable ``x`` on ``[0, inf)`` or the real line, a
density in ``x``, and the map ``x -> y`` to the variable in which orthogonal
polynomials live.  The chiral ensemble uses ``y = x**2``; real-line ensembles
such as GUE use ``y = x``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, ValidationError
from .linalg import vandermonde
from .quadrature import integrate


@dataclass(frozen=True)
class EnsembleParams:
    n: int
    nu: int = 0
    alpha: float = 1.0
    potential: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "potential", tuple(float(c) for c in self.potential))
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        if int(self.nu) != self.nu or not 0 <= self.nu:
            raise ValidationError(f"nu must be a non-negative integer, got {self.nu}")
        if self.nu > self.n:
            raise ValidationError(f"nu = {self.nu} exceeds n = {self.n}")
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if not self.potential or self.potential[-1] <= 0:
            raise ValidationError("potential needs a positive leading coefficient")

    @property
    def is_gaussian(self) -> bool:
        """True for ``V(y) = y``, where Laguerre closed forms apply."""
        return self.potential[0] == 1.0 and not any(self.potential[1:])

    def V(self, y):
        y = np.asarray(y)
        out = np.zeros_like(y, dtype=np.result_type(y, float))
        for c in reversed(self.potential):
            out = (out + c) * y
        return out

    def with_(self, **changes) -> "EnsembleParams":
        d = {"n": self.n, "nu": self.nu, "alpha": self.alpha, "potential": self.potential}
        d.update(changes)
        return EnsembleParams(**d)

    def to_dict(self) -> dict:
        return {"n": self.n, "nu": self.nu, "alpha": self.alpha, "potential": list(self.potential)}

    @classmethod
    def from_dict(cls, obj: dict) -> "EnsembleParams":
        return cls(n=int(obj["n"]), nu=int(obj.get("nu", 0)), alpha=float(obj.get("alpha", 1.0)),
                   potential=tuple(obj.get("potential", (1.0,))))

    @classmethod
    def from_json(cls, text: str) -> "EnsembleParams":
        return cls.from_dict(json.loads(text))

    def measure(self) -> "Measure":
        return chiral_measure(self.nu, self.alpha, self.potential)


@dataclass(frozen=True)
class Measure:
    """Eigenvalue measure ``density(x) dx`` with polynomial variable ``y(x)``."""

    domain: str  # "half" or "full"
    density: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    squared: bool  # y = x**2 when True, y = x otherwise
    scale: float = 1.0
    label: str = ""

    def y(self, x):
        return x * x if self.squared else x

    def integrate(self, f, tol: float = 1e-13):
        """``int f(x) density(x) dx``; ``f`` may return a stack of functions."""
        val, _ = integrate(lambda x: np.asarray(f(x)) * self.density(x), self.domain,
                           scale=self.scale, tol=tol)
        return val

    def t_of_x(self, x: float) -> float:
        """Position of ``x`` in the compactified coordinate of :mod:`quadrature`."""
        s = self.scale
        if self.domain == "half":
            return x / (s + x)
        if x == 0:
            return 0.0
        return (-s + math.sqrt(s * s + 4 * x * x)) / (2 * x)


def _potential_scale(alpha: float, potential: Sequence[float]) -> float:
    # width where alpha * V(y) ~ 1, expressed in the integration variable
    lead = [(m + 1, c) for m, c in enumerate(potential) if c > 0]
    m, c = lead[0]
    return (alpha * c) ** (-1.0 / (2 * m))


def chiral_measure(nu: int, alpha: float, potential: Sequence[float] = (1.0,)) -> Measure:
    pot = tuple(float(c) for c in potential)

    def V(y):
        out = np.zeros_like(y, dtype=float)
        for c in reversed(pot):
            out = (out + c) * y
        return out

    def density(x):
        x = np.asarray(x, dtype=float)
        return x ** (2 * nu + 1) * np.exp(-alpha * V(x * x))

    return Measure("half", density, True, _potential_scale(alpha, pot), f"chiral(nu={nu}, alpha={alpha}, V={pot})")


def real_line_measure(potential: Sequence[float] = (0.0, 1.0), alpha: float = 1.0) -> Measure:
    """``exp(-alpha * W(z)) dz`` on the real line; ``W`` has coefficients from ``z**1`` upward.

    The default ``(0, 1)`` is the Hermite weight ``exp(-z**2)``.  The leading
    power must be even with a positive coefficient.
    """
    pot = tuple(float(c) for c in potential)
    if len(pot) % 2 or pot[-1] <= 0:
        raise ValidationError("real-line potential needs an even leading power with positive coefficient")

    def density(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        for c in reversed(pot):
            out = (out + c) * z
        return np.exp(-alpha * out)

    scale = (alpha * pot[-1]) ** (-1.0 / len(pot))
    return Measure("full", density, False, scale, f"real-line(alpha={alpha}, W={pot})")


def weight_eval(params: EnsembleParams, lam) -> np.ndarray:
    """Radial weight ``lambda**(2 nu + 1) exp(-alpha V(lambda**2))``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise DomainError("weight is defined for lambda >= 0 only")
    out = lam ** (2 * params.nu + 1) * np.exp(-params.alpha * params.V(lam * lam))
    return out if out.ndim else float(out)


def moment_matrix(params: EnsembleParams, d: int) -> np.ndarray:
    """``M_ab = int_0^inf lambda**(2(a+b-2)) w(lambda) d lambda`` for ``a, b = 1..d``."""
    if d < 1:
        raise DimensionError("moment matrix needs d >= 1")
    powers = np.arange(2 * d - 1)
    m = params.measure()
    mom = m.integrate(lambda x: (x * x)[None, :] ** powers[:, None])
    idx = np.add.outer(np.arange(d), np.arange(d))
    return mom[idx]


def skew_moment_matrix(params: EnsembleParams, d: int) -> np.ndarray:
    """Antisymmetric moments of the two-point weight, reduced to one dimension.

    ``M~_ab = 1/2 int_0^inf [x^{a-1} (-x)^{b-1} - x^{b-1} (-x)^{a-1}] x^{2 nu} e^{-alpha V(x^2)} dx``.
    Only ``a + b`` odd survives, where the bracket is ``+-2 x^{a+b-2}``.
    """
    if d % 2:
        raise DimensionError("skew moment matrix needs even d")
    m = params.measure()
    # x^{2nu} = density / x, so int x^k x^{2nu} e^{..} = int x^{k-1} density
    powers = np.arange(2 * d - 1)
    raw = m.integrate(lambda x: x[None, :] ** (powers[:, None] - 1.0))
    out = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            if (a + b) % 2:
                # a, b zero-based: exponents a and b; bracket = x^{a+b} ((-1)^b - (-1)^a)
                out[a, b] = 0.5 * ((-1) ** b - (-1) ** a) * raw[a + b]
    return out


def joint_density(params: EnsembleParams, lambdas) -> float:
    """Unnormalised ``Delta_n(Lambda**2)**2 prod_j w(lambda_j)``."""
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size != params.n:
        raise DimensionError(f"expected {params.n} eigenvalues, got {lam.size}")
    w = weight_eval(params, lam)
    return float(abs(vandermonde(lam * lam)) ** 2 * np.prod(w))


def gaussian_moment(params: EnsembleParams, a: int, b: int) -> float:
    """Closed form of ``M_ab`` for ``V(y) = y``: ``Gamma(a+b+nu-1) / (2 alpha**(a+b+nu-1))``."""
    k = a + b + params.nu - 1
    return math.gamma(k) / (2 * params.alpha ** k)
