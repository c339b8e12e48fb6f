"""Adaptive composite Gauss-Legendre quadrature.

Integrands are vectorised callables ``f(x) -> array`` whose last axis runs
over the nodes, so a whole family of integrals (all moments, all polynomial
degrees, real and imaginary parts) is refined on one shared panel set.

Infinite ranges are mapped onto finite intervals:

* ``[0, inf)``: ``x = s * t / (1 - t)`` for ``t in [0, 1)``
* ``(-inf, inf)``: ``x = s * t / (1 - t**2)`` for ``t in (-1, 1)``
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import IntegrationError

ORDER = 20
MAX_LEVEL = 20


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@dataclass(frozen=True)
class Rule:
    """A fixed quadrature rule: ``sum(weights * f(nodes))``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __call__(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(f(self.nodes)) @ self.weights

    def __len__(self) -> int:
        return self.nodes.size


def _panel_nodes(lo: np.ndarray, hi: np.ndarray, order: int):
    x, w = _legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def _panel_integrals(f, lo, hi, order, with_abs=False):
    """Per-panel integrals, shape (..., npanels)."""
    nodes, weights = _panel_nodes(lo, hi, order)
    vals = np.asarray(f(nodes.ravel()))
    vals = vals.reshape(vals.shape[:-1] + nodes.shape)
    if with_abs:
        return np.sum(vals * weights, axis=-1), np.sum(np.abs(vals) * weights, axis=-1)
    return np.sum(vals * weights, axis=-1)


def _finite(v):
    # far tail of a mapped range: decaying weight times overflowing polynomial
    return np.where(np.isfinite(v), v, 0.0)


def _mapped(f, domain: str, scale: float):
    if domain == "finite":
        return f
    if domain == "half":
        def g(t):
            one_minus = 1.0 - t
            x = scale * t / one_minus
            jac = scale / one_minus**2
            return _finite(np.asarray(f(x)) * jac)
        return g
    if domain == "full":
        def g(t):
            d = 1.0 - t * t
            x = scale * t / d
            jac = scale * (1.0 + t * t) / d**2
            return _finite(np.asarray(f(x)) * jac)
        return g
    raise ValueError(f"unknown domain {domain!r}")


def _bounds(domain, a, b):
    if domain == "finite":
        return float(a), float(b)
    if domain == "half":
        return 0.0, 1.0
    return -1.0, 1.0


def _refine(g, lo, hi, *, tol, abs_tol, order, max_level, breakpoints=()):
    """Adaptive bisection; returns final panel edges and error estimate."""
    edges = np.unique(np.concatenate([np.linspace(lo, hi, 9), np.asarray(breakpoints, float)]))
    edges = edges[(edges >= lo) & (edges <= hi)]
    plo, phi = edges[:-1], edges[1:]
    level = np.zeros(plo.size, dtype=int)
    done_lo, done_hi = [], []
    total_err = np.inf
    done_l1 = None
    for _ in range(max_level + 1):
        mid = 0.5 * (plo + phi)
        coarse = _panel_integrals(g, plo, phi, order)
        left, left_abs = _panel_integrals(g, plo, mid, order, with_abs=True)
        right, right_abs = _panel_integrals(g, mid, phi, order, with_abs=True)
        diff = np.abs(left + right - coarse).reshape(-1, plo.size)
        l1 = (left_abs + right_abs).reshape(-1, plo.size)
        if done_l1 is None:
            done_l1 = np.zeros(l1.shape[0])
        # each component is judged against its own L1 norm; worst component wins
        scale = np.maximum((l1.sum(axis=-1) + done_l1) * tol, abs_tol)
        rel = np.max(diff / scale[:, None], axis=0)
        bad = rel > 1.0 / plo.size
        bad &= level < max_level
        if not np.any(bad):
            done_lo.append(plo)
            done_hi.append(phi)
            total_err = float(np.max(rel))
            break
        done_lo.append(plo[~bad])
        done_hi.append(phi[~bad])
        done_l1 = done_l1 + l1[:, ~bad].sum(axis=-1)
        b_lo, b_hi, b_mid = plo[bad], phi[bad], mid[bad]
        plo = np.concatenate([b_lo, b_mid])
        phi = np.concatenate([b_mid, b_hi])
        level = np.concatenate([level[bad], level[bad]]) + 1
    else:
        raise IntegrationError("quadrature did not converge within the refinement cap")
    lo_all = np.concatenate(done_lo)
    hi_all = np.concatenate(done_hi)
    order_idx = np.argsort(lo_all)
    return lo_all[order_idx], hi_all[order_idx], total_err


def adaptive_rule(
    f: Callable[[np.ndarray], np.ndarray],
    domain: str = "half",
    a: float = 0.0,
    b: float = 1.0,
    *,
    scale: float = 1.0,
    tol: float = 1e-13,
    abs_tol: float = 1e-300,
    order: int = ORDER,
    max_level: int = MAX_LEVEL,
    breakpoints=(),
) -> Rule:
    """Build a composite rule in the *original* variable that resolves ``f``.

    ``f`` may return a stack of functions; the rule is refined until every
    component's panel-halving error is below ``tol`` relative to its L1 norm.
    The returned nodes/weights include the Jacobian of the map, so the rule
    applies directly to integrands on the original domain.
    """
    g = _mapped(f, domain, scale)
    lo, hi = _bounds(domain, a, b)
    plo, phi, _ = _refine(g, lo, hi, tol=tol, abs_tol=abs_tol, order=order,
                          max_level=max_level, breakpoints=breakpoints)
    # evaluate the accepted panels at their bisected resolution
    mid = 0.5 * (plo + phi)
    n1, w1 = _panel_nodes(np.concatenate([plo, mid]), np.concatenate([mid, phi]), order)
    t = n1.ravel()
    wt = w1.ravel()
    if domain == "finite":
        return Rule(t, wt)
    if domain == "half":
        one_minus = 1.0 - t
        return Rule(scale * t / one_minus, wt * scale / one_minus**2)
    d = 1.0 - t * t
    return Rule(scale * t / d, wt * scale * (1.0 + t * t) / d**2)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    domain: str = "half",
    a: float = 0.0,
    b: float = 1.0,
    *,
    scale: float = 1.0,
    tol: float = 1e-12,
    abs_tol: float = 1e-300,
    order: int = ORDER,
    max_level: int = MAX_LEVEL,
    breakpoints=(),
):
    """Integrate ``f`` adaptively; returns ``(value, relative_error_estimate)``.

    Complex-valued integrands are supported; real and imaginary parts are
    refined jointly.
    """
    probe = np.asarray(f(np.array([0.5 * (a + b) if domain == "finite" else 0.5])))
    is_complex = np.iscomplexobj(probe)
    if is_complex:
        def h(x):
            v = np.asarray(f(x))
            return np.stack([v.real, v.imag])
    else:
        h = f
    g = _mapped(h, domain, scale)
    lo, hi = _bounds(domain, a, b)
    plo, phi, err = _refine(g, lo, hi, tol=tol, abs_tol=abs_tol, order=order,
                            max_level=max_level, breakpoints=breakpoints)
    mid = 0.5 * (plo + phi)
    val = (_panel_integrals(g, plo, mid, order) + _panel_integrals(g, mid, phi, order)).sum(axis=-1)
    if is_complex:
        val = val[0] + 1j * val[1]
    return val, err * tol
