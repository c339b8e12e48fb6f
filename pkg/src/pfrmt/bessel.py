"""Integer-order Bessel functions for real and complex arguments.

* ``I_n(z)``: power series for ``|z| <= 1``, otherwise Miller's backward
  recurrence normalised by ``exp(z) = I_0 + 2 sum_k I_k``.  Values for
  ``Re z < 0`` follow from ``I_n(-z) = (-1)^n I_n(z)``.
* ``J_n(z) = i^(-n) I_n(i z)``.
* ``K_0, K_1``: logarithmic series for ``|z| <= 2``, Steed's continued
  fraction beyond, then upward recurrence (stable for ``K``).  The left
  half-plane is reached by analytic continuation across the imaginary
  axis; the negative real axis is the branch cut.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.5772156649015329
_EPS = 1e-16
_BIG = 1e250


def _i_series(nmax: int, z: complex) -> np.ndarray:
    out = np.empty(nmax + 1, complex)
    q = z * z / 4
    half = z / 2
    for n in range(nmax + 1):
        term = half**n / math.factorial(n)
        total = term
        k = 0
        while True:
            k += 1
            term *= q / (k * (k + n))
            total += term
            if abs(term) <= _EPS * abs(total) or k > 200:
                break
        out[n] = total
    return out


def _i_miller(nmax: int, z: complex) -> np.ndarray:
    r = abs(z)
    top = int(max(nmax, r) + 3 * math.sqrt(max(nmax, r)) + 40)
    vals = np.zeros(top + 2, complex)
    vals[top] = 1e-300
    for k in range(top, 0, -1):
        vals[k - 1] = (2 * k / z) * vals[k] + vals[k + 1]
        if abs(vals[k - 1]) > _BIG:
            vals[k - 1 :] /= _BIG
    norm = vals[0] + 2 * np.sum(vals[1 : top + 1])
    return vals[: nmax + 1] * (np.exp(z) / norm)


def bessel_i_orders(nmax: int, z) -> np.ndarray:
    """``[I_0(z), ..., I_nmax(z)]`` as a complex array."""
    z = complex(z)
    if nmax < 0:
        raise DomainError("order must be non-negative")
    if z == 0:
        out = np.zeros(nmax + 1, complex)
        out[0] = 1.0
        return out
    flip = z.real < 0
    w = -z if flip else z
    vals = _i_series(nmax, w) if abs(w) <= 1.0 else _i_miller(nmax, w)
    if flip:
        vals = vals * (-1.0) ** np.arange(nmax + 1)
    return vals


def _order(nu) -> int:
    if int(nu) != nu:
        raise DomainError(f"only integer orders are supported, got {nu}")
    return int(nu)


def bessel_i(nu: int, z):
    """Modified Bessel function ``I_nu``; negative orders use ``I_{-n} = I_n``."""
    n = abs(_order(nu))
    val = bessel_i_orders(n, z)[n]
    return float(val.real) if np.isrealobj(z) else val


def bessel_j_orders(nmax: int, z) -> np.ndarray:
    """``[J_0(z), ..., J_nmax(z)]`` via ``J_n(z) = i^(-n) I_n(i z)``."""
    vals = bessel_i_orders(nmax, 1j * complex(z))
    return vals * (-1j) ** np.arange(nmax + 1)


def bessel_j(nu: int, x):
    """Bessel function of the first kind ``J_nu``; ``J_{-n} = (-1)^n J_n``."""
    n = _order(nu)
    m = abs(n)
    val = bessel_j_orders(m, x)[m] * (-1) ** (m if n < 0 else 0)
    if np.isrealobj(x):
        return float(val.real)
    return complex(val)


def _k01_series(z: complex) -> tuple[complex, complex]:
    q = z * z / 4
    lg = np.log(z / 2)
    i0, i1 = _i_series(1, z)
    # K_0 = -(log(z/2) + gamma) I_0 + sum q^k/(k!)^2 H_k
    term, harm, s0 = 1.0 + 0j, 0.0, 0j
    # K_1 = 1/z + log(z/2) I_1 - (z/4) sum q^k/(k!(k+1)!) (psi(k+1) + psi(k+2))
    t1, s1 = 1.0 + 0j, 0j
    for k in range(0, 200):
        if k:
            term *= q / (k * k)
            harm += 1.0 / k
            t1 *= q / (k * (k + 1))
        s0 += term * harm
        psi_sum = 2 * harm + 1.0 / (k + 1) - 2 * EULER_GAMMA
        inc = t1 * psi_sum
        s1 += inc
        if k > 2 and abs(term) * (harm + 1) <= _EPS * abs(s0) and abs(inc) <= _EPS * abs(s1):
            break
    k0 = -(lg + EULER_GAMMA) * i0 + s0
    k1 = 1 / z + lg * i1 - z / 4 * s1
    return k0, k1


def _k01_steed(z: complex) -> tuple[complex, complex]:
    # continued fraction CF2 with Temme's normalisation, order mu = 0
    b = 2 * (1 + z)
    d = 1 / b
    h = delh = d
    q1, q2 = 0j, 1 + 0j
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1 + q * delh
    for i in range(2, 100000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2
        d = 1 / (b + a * d)
        delh = (b * d - 1) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels) < _EPS * abs(s):
            break
    h = a1 * h
    k0 = np.sqrt(np.pi / (2 * z)) * np.exp(-z) / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def bessel_k_orders(nmax: int, z) -> np.ndarray:
    """``[K_0(z), ..., K_nmax(z)]``; principal branch, cut along ``z <= 0``."""
    z = complex(z)
    if z == 0:
        raise DomainError("K_nu diverges at z = 0")
    if z.real < 0:
        if z.imag == 0:
            raise DomainError(f"z = {z} lies on the branch cut of K_nu")
        # K_n(w e^{+-i pi}) = (-1)^n K_n(w) -+ i pi I_n(w) with w = -z
        w = -z
        kw = bessel_k_orders(nmax, w)
        iw = bessel_i_orders(nmax, w)
        sign = (-1.0) ** np.arange(nmax + 1)
        return sign * kw - np.copysign(1.0, z.imag) * 1j * np.pi * iw
    k0, k1 = _k01_series(z) if abs(z) <= 2.0 else _k01_steed(z)
    out = np.empty(max(nmax, 1) + 1, complex)
    out[0], out[1] = k0, k1
    for n in range(1, nmax):
        out[n + 1] = out[n - 1] + (2 * n / z) * out[n]
    return out[: nmax + 1]


def bessel_k(nu: int, x):
    """Modified Bessel function of the second kind ``K_nu`` (``K_{-n} = K_n``)."""
    n = abs(_order(nu))
    if np.isrealobj(x) and float(x) <= 0:
        raise DomainError("K_nu needs x > 0 on the real axis")
    val = bessel_k_orders(n, x)[n]
    return float(val.real) if np.isrealobj(x) else complex(val)
