import numpy as np
import pytest
from scipy import special

from pfrmt.errors import DomainError, SeparationError, ValidationError
from pfrmt.flavors import FlavorSet
from pfrmt.microscopic import (
    convergence_study,
    kernel_I,
    micro_partition_det,
    micro_partition_pf,
    micro_valid_splits,
    scaled_finite_partition,
)

BOSONS = [0.5 + 1.0j, -0.7 + 0.6j, 1.2 - 0.9j]
FERMIONS = [0.8 - 0.2j, 0.3 + 0.4j, -1.1 + 0.3j, 0.6 + 1.2j]


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("which", [1, 3])
@pytest.mark.parametrize("nu", [0, 1, 2])
@pytest.mark.parametrize("c", [0.6, 2.3])
def test_kernel_diagonal_is_continuous(which, nu, c):
    # K(c - h, c + h) is even in h, so one Richardson step removes the h^2 term
    h = 1e-2
    a = [kernel_I(which, nu, c - h / 2**i, c + h / 2**i) for i in range(2)]
    limit = (4 * a[1] - a[0]) / 3
    assert rel(limit, kernel_I(which, nu, c, c)) < 1e-7


@pytest.mark.parametrize("which", [1, 3])
@pytest.mark.parametrize("nu", [0, 1, 2])
def test_kernel_one_sided_limit(which, nu):
    h = 1e-4
    a = [kernel_I(which, nu, 1.0, 1.0 + h / 2**i) for i in range(2)]
    assert rel(2 * a[1] - a[0], kernel_I(which, nu, 1.0, 1.0)) < 1e-7


def test_kernel_diagonal_closed_form():
    j = [special.jv(n, 1.0) for n in range(3)]
    assert kernel_I(1, 1, 1.0, 1.0) == pytest.approx((j[2] * j[0] - j[1] ** 2) / 2, rel=1e-13)


def test_kernels_are_symmetric():
    a, b = 0.9 + 0.2j, 1.7 - 0.4j
    for which in (1, 3):
        assert abs(kernel_I(which, 1, a, b) - kernel_I(which, 1, b, a)) < 1e-14


def test_kernel_guards():
    with pytest.raises(SeparationError):
        kernel_I(2, 0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        kernel_I(4, 0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        kernel_I(1, -1, 1.0, 2.0)


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_single_fermion_is_bessel_i(nu):
    k = 0.7 + 0.3j
    ref = special.iv(nu, -1j * k)
    assert rel(micro_partition_pf(nu, FlavorSet([], [k])).value, ref) < 1e-13
    assert rel(micro_partition_det(nu, FlavorSet([], [k])).value, ref) < 1e-13


@pytest.mark.parametrize("nu", [0, 1, 3])
@pytest.mark.parametrize("k1,k2", [(0, 2), (1, 1), (2, 0), (1, 2), (2, 1), (0, 3), (2, 2), (1, 3), (0, 4), (3, 1)])
def test_micro_det_equals_pf(nu, k1, k2):
    fl = FlavorSet(BOSONS[:k1], FERMIONS[:k2])
    ref = micro_partition_pf(nu, fl).value
    for split in micro_valid_splits(k1, k2):
        assert rel(micro_partition_det(nu, fl, split).value, ref) < 1e-10


def test_micro_permutation_invariance():
    fl = FlavorSet(BOSONS[:2], FERMIONS[:3])
    a = micro_partition_pf(1, fl).value
    b = micro_partition_pf(1, fl.permuted([1, 0], [2, 0, 1])).value
    assert rel(a, b) < 1e-12


def test_micro_rejects_real_boson_mass():
    with pytest.raises(DomainError):
        micro_partition_pf(0, FlavorSet([0.5], []))


@pytest.mark.parametrize("nu", [0, 1])
@pytest.mark.parametrize("k1,k2", [(0, 2), (1, 1), (2, 0), (1, 2)])
def test_finite_n_converges(nu, k1, k2):
    # corrections are O(1/n): Richardson between n = 60 and n = 120
    fl = FlavorSet(BOSONS[:k1], FERMIONS[:k2])
    z60 = scaled_finite_partition(60, nu, fl)
    z120 = scaled_finite_partition(120, nu, fl)
    ref = micro_partition_pf(nu, fl).value
    assert rel(2 * z120 - z60, ref) < 1e-3
    assert rel(z120, ref) < rel(z60, ref)


def test_two_fermion_example_at_n200():
    fl = FlavorSet([], [0.7 + 0.3j, 1.1 - 0.2j])
    assert rel(scaled_finite_partition(200, 0, fl), micro_partition_det(0, fl).value) < 0.02


@pytest.mark.parametrize("nu", [0, 1])
def test_two_fermion_error_decreases_in_n(nu):
    fl = FlavorSet([], [0.7 + 0.3j, 1.1 - 0.2j])
    ref = micro_partition_det(nu, fl).value
    errs = [rel(scaled_finite_partition(n, nu, fl), ref) for n in (50, 100, 200)]
    assert errs[0] > errs[1] > errs[2]
    # first order in 1/n
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.05)


def test_convergence_table_decreases():
    rows = convergence_study([25, 50, 100, 200], 1, np.linspace(0.25, 3, 12))
    worst = {}
    for r in rows:
        worst[r.n] = max(worst.get(r.n, 0.0), r.deviation_p, r.deviation_phat)
    ns = sorted(worst)
    assert all(worst[a] > worst[b] for a, b in zip(ns, ns[1:]))
    assert worst[200] < 5e-3
    # roughly first order in 1/n
    assert 1.5 < worst[100] / worst[200] < 2.5


def test_convergence_guards():
    with pytest.raises(DomainError):
        convergence_study([10], 0, [0.0, 1.0])
    with pytest.raises(ValidationError):
        convergence_study([1], 2, [1.0])
