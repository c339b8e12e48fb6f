import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfrmt.errors import DimensionError, SeparationError, SingularBlockError, UnsupportedError, ValidationError
from pfrmt.linalg import (
    antisymmetrize,
    berezinian_sqrt,
    block_matrix,
    determinant,
    matrix_from_json,
    matrix_to_json,
    pfaffian,
    schur_det_reduce,
    schur_pf_reduce,
    vandermonde,
    vandermonde_det,
)


def random_antisym(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return a - a.T


def test_pfaffian_small_cases():
    assert pfaffian(np.zeros((0, 0))) == 1
    assert pfaffian([[0, 3.5], [-3.5, 0]]) == 3.5
    a = np.array([[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]], float)
    # Pf = a01 a23 - a02 a13 + a03 a12
    assert pfaffian(a) == pytest.approx(1 * 6 - 2 * 5 + 3 * 4)


def test_pfaffian_odd_dimension_is_zero():
    val, info = pfaffian(np.zeros((3, 3)), full_output=True)
    assert val == 0 and info["odd"]


def test_pfaffian_rejects_symmetric_contamination():
    a = random_antisym(np.random.default_rng(1), 4)
    a[0, 1] += 0.1
    with pytest.raises(ValidationError):
        pfaffian(a)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_expansion_and_tridiagonal_agree(half, seed):
    a = random_antisym(np.random.default_rng(seed), 2 * half)
    e = pfaffian(a, method="expansion") if half <= 5 else pfaffian(a, method="tridiagonal")
    t = pfaffian(a, method="tridiagonal")
    assert abs(e - t) <= 1e-10 * max(abs(t), 1.0)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_pfaffian_squared_is_determinant(half, seed):
    a = random_antisym(np.random.default_rng(seed), 2 * half)
    pf = pfaffian(a)
    det = determinant(a)
    assert abs(pf * pf - det) <= 1e-10 * abs(det)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_pfaffian_congruence(half, seed):
    rng = np.random.default_rng(seed)
    a = random_antisym(rng, 2 * half)
    b = rng.standard_normal((2 * half, 2 * half))
    lhs = pfaffian(b @ a @ b.T)
    assert abs(lhs - determinant(b) * pfaffian(a)) <= 1e-9 * max(abs(lhs), 1.0)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_block_embedding_sign(p):
    x = np.random.default_rng(p).standard_normal((p, p))
    z = np.zeros((p, p))
    big = np.block([[z, x], [-x.T, z]])
    assert pfaffian(big) == pytest.approx((-1) ** (p * (p - 1) // 2) * np.linalg.det(x))


def test_vandermonde_convention():
    assert vandermonde([1, 2, 4]) == pytest.approx(-6)
    z = np.random.default_rng(3).standard_normal(5) + 1j
    assert vandermonde(z) == pytest.approx(vandermonde_det(z))


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_berezinian_forms_agree(p, extra, seed):
    q = p + extra
    rng = np.random.default_rng(seed)
    x1 = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    x2 = rng.standard_normal(q) + 1j * rng.standard_normal(q)
    a = berezinian_sqrt(x1, x2)
    b = berezinian_sqrt(x1, x2, form="determinant")
    assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_berezinian_guards():
    with pytest.raises(SeparationError):
        berezinian_sqrt([1.0], [1.0])
    with pytest.raises(UnsupportedError):
        berezinian_sqrt([1.0, 2.0], [3.0], form="determinant")
    assert berezinian_sqrt([], []) == 1


def test_schur_reductions():
    rng = np.random.default_rng(7)
    a, b, c, d = (rng.standard_normal((3, 3)) for _ in range(4))
    assert schur_det_reduce(a, b, c, d) == pytest.approx(determinant(block_matrix(a, b, c, d)))
    aa, cc = random_antisym(rng, 2), random_antisym(rng, 4)
    bb = rng.standard_normal((2, 4))
    full = np.block([[aa, bb], [-bb.T, cc]])
    assert schur_pf_reduce(aa, bb, cc) == pytest.approx(pfaffian(full))
    with pytest.raises(SingularBlockError):
        schur_det_reduce(a, b, c, np.zeros((3, 3)))


def test_block_pfaffian_with_zero_coupling():
    rng = np.random.default_rng(11)
    a, c = random_antisym(rng, 4), random_antisym(rng, 2)
    full = np.block([[a, np.zeros((4, 2))], [np.zeros((2, 4)), c]])
    assert pfaffian(full) == pytest.approx(pfaffian(a) * pfaffian(c))


def test_matrix_json_round_trip():
    m = np.arange(6).reshape(2, 3) + 1j
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)
    with pytest.raises(DimensionError):
        matrix_from_json({"rows": 2, "cols": 2, "re": [1.0]})


def test_antisymmetrize_halves_deviation():
    a = random_antisym(np.random.default_rng(5), 4)
    a[0, 1] += 1e-14
    out = antisymmetrize(a)
    assert np.allclose(out, -out.T, atol=0)


def test_vandermonde_split_identity():
    # Delta_{p+q}(x1, x2) = Delta_p(x1) Delta_q(x2) prod (x1_a - x2_b)
    rng = np.random.default_rng(2)
    for p, q in itertools.product(range(4), range(4)):
        x1, x2 = rng.standard_normal(p), rng.standard_normal(q)
        cross = np.prod(x1[:, None] - x2[None, :]) if p and q else 1.0
        assert vandermonde(np.concatenate([x1, x2])) == pytest.approx(vandermonde(x1) * vandermonde(x2) * cross)
