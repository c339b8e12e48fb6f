import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfrmt.ensemble import EnsembleParams, joint_density, moment_matrix, skew_moment_matrix, weight_eval
from pfrmt.linalg import vandermonde


def test_joint_density_examples():
    p = EnsembleParams(2, 0)
    assert joint_density(EnsembleParams(1, 0), [1.3]) == pytest.approx(1.3 * math.exp(-1.69))
    assert joint_density(p, [1.0, 1.0]) == 0
    # (1 - 4)^2 w(1) w(2) with w(x) = x e^{-x^2}
    assert joint_density(p, [1.0, 2.0]) == pytest.approx(18 * math.exp(-5), rel=1e-14)
    w = weight_eval(p, np.array([1.0, 2.0]))
    assert joint_density(p, [1.0, 2.0]) == pytest.approx(9 * w[0] * w[1], rel=1e-14)


def test_skew_moment_entries():
    m = skew_moment_matrix(EnsembleParams(2, 0), 4)
    assert np.allclose(m, -m.T)
    assert m[0, 1] == pytest.approx(-0.5, rel=1e-12)
    assert m[0, 2] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_moment_matrix_positive_definite(nu):
    for d in range(1, 9):
        np.linalg.cholesky(moment_matrix(EnsembleParams(4, nu, potential=(1.0, 0.3)), d))


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_vandermonde_of_squares_from_doubled_set(n, seed):
    lam = np.random.default_rng(seed).uniform(0.1, 3.0, n)
    lhs = vandermonde(lam**2) ** 2
    rhs = (-1) ** (n * (n - 1) // 2) * vandermonde(np.concatenate([lam, -lam])) / (2**n * np.prod(lam))
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)
