"""Dense complex linear algebra: determinants, Pfaffians, Vandermonde and
Berezinian-root products, and the Schur-complement block reductions.

All routines take array-likes, work in complex128 and return Python complex
scalars.  Nothing here caches or mutates its inputs.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import DimensionError, SeparationError, SingularBlockError, UnsupportedError, ValidationError

ANTISYM_TOL = 1e-12
SEPARATION = 1e-9
COND_LIMIT = 1e14
EXPANSION_MAX_DIM = 8


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def determinant(a) -> complex:
    """Determinant by partial-pivot LU (LAPACK ``getrf`` via numpy)."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"determinant of a non-square {m.shape} matrix")
    if m.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(m))


def antisymmetrize(a, tol: float = ANTISYM_TOL) -> np.ndarray:
    """Return ``(A - A^T)/2`` after checking ``A + A^T`` is negligible.

    The check is relative: ``max|A + A^T| <= tol * max|A|``.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"Pfaffian of a non-square {m.shape} matrix")
    if m.size == 0:
        return m
    scale = np.max(np.abs(m))
    dev = np.max(np.abs(m + m.T))
    if dev > tol * scale:
        raise ValidationError(f"matrix is not antisymmetric: max|A + A^T| = {dev:.3e} "
                              f"exceeds {tol:.1e} * max|A| = {tol * scale:.3e}")
    return 0.5 * (m - m.T)


def _pf_expand(m: np.ndarray) -> complex:
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 2:
        return complex(m[0, 1])
    total = 0j
    rest = np.arange(1, n)
    for pos, j in enumerate(rest):
        if m[0, j] == 0:
            continue
        keep = np.delete(rest, pos)
        sign = -1.0 if pos % 2 else 1.0
        total += sign * m[0, j] * _pf_expand(m[np.ix_(keep, keep)])
    return total


def _pf_parlett_reid(m: np.ndarray) -> complex:
    # Skew-symmetric LTL^T tridiagonalisation with partial pivoting.
    a = m.copy()
    n = a.shape[0]
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def pfaffian(a, *, method: str = "auto", tol: float = ANTISYM_TOL, full_output: bool = False):
    """Pfaffian of an antisymmetric matrix.

    ``method`` is ``"expansion"`` (recursive minor expansion along the first
    row), ``"tridiagonal"`` (Parlett-Reid with pivoting) or ``"auto"``
    (expansion up to dimension 8).  The convention is
    ``Pf[[0, X], [-X^T, 0]] = (-1)**(p*(p-1)/2) det X``.

    Odd dimensions give 0.  With ``full_output=True`` a second value is
    returned: a dict with keys ``odd`` and ``method``.
    """
    m = antisymmetrize(a, tol)
    n = m.shape[0]
    if n % 2:
        val, used = 0j, "odd"
    else:
        if method == "auto":
            method = "expansion" if n <= EXPANSION_MAX_DIM else "tridiagonal"
        if method == "expansion":
            val = _pf_expand(m)
        elif method == "tridiagonal":
            val = _pf_parlett_reid(m)
        else:
            raise ValueError(f"unknown Pfaffian method {method!r}")
        used = method
    if full_output:
        return val, {"odd": bool(n % 2), "method": used}
    return val


def vandermonde(z: Sequence[complex]) -> complex:
    """``prod_{a<b} (z_a - z_b)``."""
    z = np.asarray(z, dtype=complex).ravel()
    n = z.size
    if n < 2:
        return 1.0 + 0j
    iu = np.triu_indices(n, 1)
    diffs = z[:, None] - z[None, :]
    return complex(np.prod(diffs[iu]))


def vandermonde_det(z: Sequence[complex]) -> complex:
    """Same quantity as :func:`vandermonde`, via ``(-1)^{N(N-1)/2} det[z_a^{b-1}]``."""
    z = np.asarray(z, dtype=complex).ravel()
    n = z.size
    v = z[:, None] ** np.arange(n)[None, :]
    return (-1) ** (n * (n - 1) // 2) * determinant(v)


def _check_separation(x1: np.ndarray, x2: np.ndarray) -> None:
    if x1.size == 0 or x2.size == 0:
        return
    scale = max(np.max(np.abs(x1)), np.max(np.abs(x2)), 1e-300)
    gap = np.min(np.abs(x1[:, None] - x2[None, :]))
    if gap < SEPARATION * scale:
        raise SeparationError(f"boson/fermion arguments coincide to {gap:.3e}")


def berezinian_sqrt(x1: Sequence[complex], x2: Sequence[complex], *, form: str = "product") -> complex:
    """Square root of the Berezinian of ``diag(x1, x2)``.

    ``Delta_p(x1) Delta_q(x2) / prod_{a,b} (x1_a - x2_b)``.  The product form
    accepts any ``p, q``; ``form="determinant"`` uses the Cauchy/monomial
    block determinant and needs ``p <= q``.
    """
    x1 = np.asarray(x1, dtype=complex).ravel()
    x2 = np.asarray(x2, dtype=complex).ravel()
    p, q = x1.size, x2.size
    _check_separation(x1, x2)
    if form == "product":
        cross = np.prod(x1[:, None] - x2[None, :]) if p and q else 1.0
        return complex(vandermonde(x1) * vandermonde(x2) / cross)
    if form != "determinant":
        raise ValueError(f"unknown form {form!r}")
    if p > q:
        raise UnsupportedError(f"determinant form needs p <= q, got p={p}, q={q}")
    rows = [1.0 / (x1[:, None] - x2[None, :])] if p else []
    if q - p:
        rows.append(x2[None, :] ** np.arange(q - p)[:, None])
    m = np.vstack(rows) if rows else np.zeros((0, 0), complex)
    sign = (-1) ** ((q * (q - 1) // 2 + (q + 1) * p) % 2)
    return sign * determinant(m)


def schur_det_reduce(a, b, c, d) -> complex:
    """``det D * det(A - B D^{-1} C)``, the determinant of ``[[A, B], [C, D]]``."""
    a, b, c, d = (as_matrix(x) for x in (a, b, c, d))
    if d.shape[0] != d.shape[1] or a.shape[0] != a.shape[1]:
        raise DimensionError("A and D must be square")
    if b.shape != (a.shape[0], d.shape[0]) or c.shape != (d.shape[0], a.shape[0]):
        raise DimensionError("blocks are not conformal")
    if d.shape[0] == 0:
        return determinant(a)
    if np.linalg.cond(d) > COND_LIMIT:
        raise SingularBlockError("D block is numerically singular")
    return determinant(d) * determinant(a - b @ np.linalg.solve(d, c))


def schur_pf_reduce(a, b, c) -> complex:
    """``Pf C * Pf(A + B C^{-1} B^T)``, the Pfaffian of ``[[A, B], [-B^T, C]]``."""
    a, b, c = (as_matrix(x) for x in (a, b, c))
    a = antisymmetrize(a)
    c = antisymmetrize(c)
    if c.shape[0] % 2 or a.shape[0] % 2:
        raise DimensionError("Pfaffian blocks must have even dimension")
    if b.shape != (a.shape[0], c.shape[0]):
        raise DimensionError("blocks are not conformal")
    if c.shape[0] == 0:
        return pfaffian(a)
    if np.linalg.cond(c) > COND_LIMIT:
        raise SingularBlockError("C block is numerically singular")
    inner = a + b @ np.linalg.solve(c, b.T)
    return pfaffian(c) * pfaffian(0.5 * (inner - inner.T))


def block_matrix(a, b, c, d) -> np.ndarray:
    return np.block([[as_matrix(a), as_matrix(b)], [as_matrix(c), as_matrix(d)]])


def matrix_to_json(a) -> str:
    m = as_matrix(a)
    return json.dumps({"rows": m.shape[0], "cols": m.shape[1],
                       "re": m.real.ravel().tolist(), "im": m.imag.ravel().tolist()})


def matrix_from_json(text) -> np.ndarray:
    obj = json.loads(text) if isinstance(text, str) else text
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionError("entries length does not match rows * cols")
    return (re + 1j * im).reshape(rows, cols)
