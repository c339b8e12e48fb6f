"""Brute-force reference evaluators.

Nothing in this module uses orthogonal polynomials, kernels or Pfaffians.

* :func:`quad_partition` integrates the joint eigenvalue density directly on
  a tensor product of adaptive one-dimensional rules (``n <= 3``).
* :func:`bessel_j_integral`, :func:`bessel_k_integral` and
  :func:`wilson_entry_direct` evaluate integral representations with scipy
  routines, independently of :mod:`pfrmt.bessel`.
* :func:`mc_partition` averages ratios of ``det(D - i kappa)`` over sampled
  Dirac matrices.  Chunk ``c`` draws from its own Philox stream spawned from
  ``(seed, c)``, and chunk results are reduced in index order, so the
  estimate does not depend on how many worker threads ran the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad as integrate_quad
from scipy.special import jv

from .ensemble import EnsembleParams, Measure
from .errors import DimensionError, UnsupportedError, ValidationError
from .flavors import FlavorSet, PartitionResult
from .quadrature import adaptive_rule

MAX_QUAD_N = 3


def default_threads() -> int:
    env = os.environ.get("PFRMT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"PFRMT_THREADS must be an integer, got {env!r}")
    return 1


# ---------------------------------------------------------------- quadrature

def _tensor_sum(y: np.ndarray, g: np.ndarray, m: int) -> complex:
    """``sum_{i1..im} prod g_i * Delta_m(y_i)**2`` over the rule nodes."""
    if m == 0:
        return 1.0 + 0j
    if m == 1:
        return complex(np.sum(g))
    if m == 2:
        d = (y[:, None] - y[None, :]) ** 2
        return complex(g @ d @ g)
    if m == 3:
        total = 0j
        d = (y[:, None] - y[None, :]) ** 2
        for i in range(y.size):
            a = g * (y[i] - y) ** 2
            total += g[i] * (a @ d @ a)
        return complex(total)
    raise UnsupportedError(f"tensor quadrature is limited to {MAX_QUAD_N} eigenvalues")


def _rule_for(measure: Measure, m: int, factor: Callable, tol: float):
    powers = np.arange(max(2 * m - 1, 1))

    def family(x):
        y = measure.y(x)
        f = factor(y)
        base = y[None, :] ** powers[:, None] * measure.density(x)
        return np.concatenate([base, base * f.real, base * f.imag])

    return adaptive_rule(family, measure.domain, scale=measure.scale, tol=tol)


def quad_integral(measure: Measure, m: int, factor: Callable, *, tol: float = 1e-13) -> complex:
    """Unnormalised ``int Delta_m(y)**2 prod_a factor(y_a) density(x_a) dx_a``."""
    if m > MAX_QUAD_N:
        raise UnsupportedError(f"quadrature oracle supports at most {MAX_QUAD_N} eigenvalues")
    if m == 0:
        return 1.0 + 0j
    rule = _rule_for(measure, m, factor, tol)
    y = measure.y(rule.nodes)
    g = rule.weights * measure.density(rule.nodes) * factor(y)
    return _tensor_sum(y, g, m)


def quad_expectation(measure: Measure, m: int, factor: Callable, *, tol: float = 1e-13) -> tuple[complex, float]:
    """``E_m[prod_a factor(y_a)]`` and an error estimate from a coarser rule."""
    one = lambda y: np.ones_like(y, dtype=complex)
    fine = quad_integral(measure, m, factor, tol=tol) / quad_integral(measure, m, one, tol=tol)
    coarse_tol = tol * 1e3
    coarse = quad_integral(measure, m, factor, tol=coarse_tol) / quad_integral(measure, m, one, tol=coarse_tol)
    return complex(fine), float(abs(fine - coarse))


def flavour_factor(bosonic_u, fermionic_u) -> Callable:
    bu = np.asarray(bosonic_u, complex)
    fu = np.asarray(fermionic_u, complex)

    def factor(y):
        y = np.asarray(y, dtype=complex)
        out = np.ones_like(y)
        for u in fu:
            out = out * (y - u)
        for u in bu:
            out = out / (y - u)
        return out

    return factor


def chiral_prefactor(flavors: FlavorSet, nu: int) -> complex:
    """``prod_f (-i kappa_f)**nu / prod_b (-i kappa_b)**nu`` from the zero modes."""
    num = np.prod([(-1j * k) ** nu for k in flavors.fermionic]) if flavors.k2 else 1.0
    den = np.prod([(-1j * k) ** nu for k in flavors.bosonic]) if flavors.k1 else 1.0
    return complex(num / den)


def quad_partition(params: EnsembleParams, flavors: FlavorSet, *, tol: float = 1e-13) -> PartitionResult:
    """``Z_{k1/k2} / Z_{0/0}`` by direct integration over the ``n`` squared singular values."""
    if params.n > MAX_QUAD_N:
        raise UnsupportedError(f"quadrature oracle supports n <= {MAX_QUAD_N}, got {params.n}")
    flavors.require_offaxis_bosons()
    factor = flavour_factor([k * k for k in flavors.bosonic], [k * k for k in flavors.fermionic])
    val, err = quad_expectation(params.measure(), params.n, factor, tol=tol)
    pref = chiral_prefactor(flavors, params.nu)
    return PartitionResult(pref * val, "quad", info={"error_estimate": abs(pref) * err})


def quad_generic(measure: Measure, N: int, flavors: FlavorSet, *, tol: float = 1e-13) -> PartitionResult:
    """Normalised average of ``prod (z - kappa_f) / prod (z - kappa_b)`` for a real-line measure."""
    if N > MAX_QUAD_N:
        raise UnsupportedError(f"quadrature oracle supports N <= {MAX_QUAD_N}, got {N}")
    flavors.require_offaxis_bosons()
    factor = flavour_factor(flavors.bosonic, flavors.fermionic)
    val, err = quad_expectation(measure, N, factor, tol=tol)
    return PartitionResult(val, "quad", info={"error_estimate": err})


def quad_kpoint(params: EnsembleParams, x, k: int | None = None, *, tol: float = 1e-13) -> float:
    """``R_k`` at the points ``x`` by integrating out the remaining ``n - k`` eigenvalues.

    Normalised so that ``R_1`` integrates to ``n``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = x.size if k is None else k
    if k != x.size:
        raise DimensionError(f"expected {k} points, got {x.size}")
    n = params.n
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got k = {k}, n = {n}")
    if n > MAX_QUAD_N:
        raise UnsupportedError(f"quadrature oracle supports n <= {MAX_QUAD_N}, got {n}")
    m = params.measure()
    y0 = x * x
    rest = n - k
    fix = flavour_factor([], np.concatenate([y0, y0]))
    one = lambda y: np.ones_like(y, dtype=complex)
    inner = quad_integral(m, rest, fix, tol=tol)
    z_full = quad_integral(m, n, one, tol=tol)
    dv = np.prod([(y0[a] - y0[b]) ** 2 for a in range(k) for b in range(a + 1, k)]) if k > 1 else 1.0
    w = np.prod(m.density(x))
    count = math.factorial(n) / math.factorial(rest)
    return float((count * dv * w * inner / z_full).real)


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = 0
    chunk: int = 10_000

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValidationError(f"samples must be a positive integer, got {self.samples}")
        if int(self.chunk) != self.chunk or self.chunk < 1:
            raise ValidationError(f"chunk must be a positive integer, got {self.chunk}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def n_chunks(self) -> int:
        return -(-self.samples // self.chunk)


def _linear_scale(params: EnsembleParams) -> float:
    c = params.potential
    if any(c[1:]):
        raise UnsupportedError("direct sampling needs a linear potential V(y) = c y")
    return params.alpha * c[0]


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_matrix(params: EnsembleParams, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw ``W`` (``n x (n + nu)``) with density proportional to ``exp(-alpha c tr W W^dagger)``."""
    a = _linear_scale(params)
    shape = (params.n, params.n + params.nu) if size is None else (size, params.n, params.n + params.nu)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / math.sqrt(2 * a)


def dirac_matrix(w: np.ndarray) -> np.ndarray:
    """``D = [[0, W], [-W^dagger, 0]]`` (batched over leading axes)."""
    n, m = w.shape[-2:]
    d = np.zeros(w.shape[:-2] + (n + m, n + m), complex)
    d[..., :n, n:] = w
    d[..., n:, :n] = -np.conj(np.swapaxes(w, -1, -2))
    return d


def _chunk_values(params: EnsembleParams, flavors: FlavorSet, seed: int, index: int, size: int) -> np.ndarray:
    rng = chunk_generator(seed, index)
    d = dirac_matrix(sample_matrix(params, rng, size))
    eye = np.eye(d.shape[-1])
    vals = np.ones(size, complex)
    for k in flavors.fermionic:
        vals *= np.linalg.det(d - 1j * k * eye)
    for k in flavors.bosonic:
        vals /= np.linalg.det(d - 1j * k * eye)
    return vals


def mc_partition(params: EnsembleParams, flavors: FlavorSet, cfg: McConfig = McConfig(), *,
                 threads: int | None = None) -> PartitionResult:
    """Sample mean of ``prod det(D - i k_f) / prod det(D - i k_b)`` with a jackknife error."""
    _linear_scale(params)
    if flavors.k1:
        flavors.require_offaxis_bosons()
    sizes = [min(cfg.chunk, cfg.samples - c * cfg.chunk) for c in range(cfg.n_chunks)]
    threads = default_threads() if threads is None else max(1, int(threads))

    def run(c):
        v = _chunk_values(params, flavors, cfg.seed, c, sizes[c])
        return complex(np.sum(v)), float(np.sum(np.abs(v) ** 2))

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(c) for c in range(len(sizes))]

    sums = np.array([p[0] for p in parts])
    sq = np.array([p[1] for p in parts])
    counts = np.array(sizes, float)
    total, n_tot = 0j, 0.0
    for s, c in zip(sums, counts):  # fixed reduction order
        total += s
        n_tot += c
    mean = total / n_tot
    if len(sizes) >= 2:
        loo = (total - sums) / (n_tot - counts)
        g = len(sizes)
        stderr = math.sqrt((g - 1) / g * float(np.sum(np.abs(loo - loo.mean()) ** 2)))
    else:
        var = max(float(sq.sum()) / n_tot - abs(mean) ** 2, 0.0)
        stderr = math.sqrt(var / max(n_tot - 1, 1))
    warnings = []
    if flavors.k1:
        warnings.append("bosonic flavours make the estimator heavy-tailed; prefer quadrature")
    if stderr > abs(mean):
        warnings.append("standard error exceeds the magnitude of the mean")
    return PartitionResult(complex(mean), "mc", stderr=stderr, warnings=tuple(warnings),
                           info={"samples": cfg.samples, "seed": cfg.seed, "chunk": cfg.chunk})


# ---------------------------------------------------------------- special functions

def bessel_j_integral(n: int, x: float, *, points: int = 512) -> float:
    """``J_n(x) = (1/2pi) int_0^2pi cos(n t - x sin t) dt`` by the periodic trapezoidal rule.

    The rule converges geometrically once ``points`` exceeds ``|x| + |n|``.
    """
    if points <= abs(x) + abs(n) + 40:
        raise ValidationError("too few points for this order and argument")
    t = 2 * math.pi * np.arange(points) / points
    return float(np.mean(np.cos(n * t - x * np.sin(t))))


def bessel_k_integral(nu: int, x: float) -> float:
    """``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`` for ``x > 0``."""
    if x <= 0:
        raise ValidationError("K_nu integral needs x > 0")
    # the integrand is below 1e-300 beyond t_max
    t_max = math.acosh(max(1.0, 700.0 / x)) + 1.0
    f = lambda t: math.exp(-x * math.cosh(t) + nu * t) * (1 + math.exp(-2 * nu * t)) / 2
    val, _ = integrate_quad(f, 0.0, t_max, epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def wilson_entry_direct(nu: int, a_hat: float, m1: float, m2: float, *, nodes: int = 400) -> float:
    """``(m1 - m2) Z2(m1, m2)`` integrated along the real axes, no contour shift.

    Only usable where ``exp(m^2/4a^2)`` and the ``exp(i m s/2a^2)`` oscillation
    stay moderate (``a_hat`` of order one, small masses).
    """
    half = 2 * a_hat * math.sqrt(2 * math.log(1e18)) + 1.0
    # different node counts on the two axes keep s1 + s2 away from zero
    x1, w1 = np.polynomial.legendre.leggauss(nodes)
    x2, w2 = np.polynomial.legendre.leggauss(nodes + 1)
    s1, s2 = half * x1, half * x2
    g1 = half * w1 * np.exp(-((s1 - 1j * m1) ** 2) / (4 * a_hat**2))
    g2 = half * w2 * np.exp(-((s2 - 1j * m2) ** 2) / (4 * a_hat**2))
    num = np.outer(s1 * jv(nu - 1, s1), jv(nu, s2)) - np.outer(jv(nu, s1), s2 * jv(nu - 1, s2))
    f = num / (s1[:, None] + s2[None, :])
    total = g1 @ f @ g2
    return float(((-1) ** nu * 1j * total / (4 * math.pi * a_hat**2)).real)
