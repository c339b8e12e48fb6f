import numpy as np
import pytest

from pfrmt.ensemble import EnsembleParams, real_line_measure
from pfrmt.errors import DimensionError, DomainError, SeparationError, UnsupportedError
from pfrmt.flavors import DetSplit, FlavorSet, valid_splits
from pfrmt.oracles import quad_generic, quad_kpoint, quad_partition
from pfrmt.partition import (
    Blocks,
    kpoint_det,
    kpoint_pf,
    kpoint_pf_identity_residual,
    partition_det,
    partition_generic_det,
    partition_generic_pf,
    partition_pf,
    system_for,
    z_building_blocks,
)
from pfrmt.polynomials import laguerre_system

BOSONS = [-0.4 + 0.9j, 0.6 - 0.7j, 0.2 + 1.3j]
FERMIONS = [0.8 + 0.1j, 1.1 - 0.5j, -0.3 + 0.6j, 0.45 + 0.2j]


def flavors(k1, k2):
    return FlavorSet(BOSONS[:k1], FERMIONS[:k2])


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# frozen from the tensor-quadrature oracle
QUAD_REFERENCE = [
    (EnsembleParams(2, 1), FlavorSet([0.3 + 0.8j], [1.0 - 0.2j, 0.5j]),
     0.7929986552770685 - 0.27562914666769195j),
    (EnsembleParams(3, 0), FlavorSet([-0.4 + 0.9j, 0.6 - 0.7j], [0.8 + 0.1j]),
     0.006859548027067403 + 0.0020005281754917267j),
]


@pytest.mark.parametrize("params,fl,ref", QUAD_REFERENCE)
def test_frozen_quadrature_values(params, fl, ref):
    assert rel(partition_pf(None, params, fl).value, ref) < 1e-9
    assert rel(partition_det(None, params, fl).value, ref) < 1e-9


def test_one_flavour_closed_forms():
    # Z_{0/1} = (-i kappa)^nu (-1)^n p_n(kappa^2) with monic Laguerre p_n
    p = EnsembleParams(3, 1)
    k = 0.7 + 0.2j
    sys = laguerre_system(p, 6)
    z = partition_pf(sys, p, FlavorSet([], [k])).value
    assert rel(z, (-1j * k) * (-1) ** 3 * sys.p(3, k * k)) < 1e-12


@pytest.mark.parametrize("n,nu", [(1, 0), (2, 1), (3, 2), (4, 0)])
@pytest.mark.parametrize("k1,k2", [(0, 2), (1, 1), (2, 0), (1, 2), (2, 2), (0, 3)])
def test_det_matches_pf_all_splits(n, nu, k1, k2):
    p = EnsembleParams(n, nu)
    if 2 * n + k2 - k1 < 0:
        pytest.skip("inadmissible")
    fl = flavors(k1, k2)
    ref = partition_pf(None, p, fl).value
    for split in valid_splits(n, k1, k2):
        assert rel(partition_det(None, p, fl, split).value, ref) < 1e-8


def test_flavour_permutation_invariance():
    p = EnsembleParams(3, 1)
    fl = flavors(2, 2)
    a = partition_pf(None, p, fl).value
    b = partition_pf(None, p, fl.permuted([1, 0], [1, 0])).value
    assert rel(a, b) < 1e-12


def test_errors():
    p = EnsembleParams(2, 0)
    with pytest.raises(DomainError):
        partition_pf(None, p, FlavorSet([0.5], []))
    with pytest.raises(SeparationError):
        FlavorSet([], [0.5, 0.5])
    with pytest.raises(UnsupportedError):
        partition_det(None, p, flavors(1, 1), DetSplit(0, 1))  # d1 > d2
    with pytest.raises(UnsupportedError):
        partition_pf(None, EnsembleParams(1, 0), flavors(3, 0))


def test_building_blocks_match_quadrature():
    p = EnsembleParams(2, 1)
    sys = system_for(p, 6)
    a, b = 0.3 + 0.9j, 0.8 - 0.1j
    z = z_building_blocks(sys, 2, a, b)
    assert rel(z["z11"], quad_partition(p, FlavorSet([a], [b])).value) < 1e-10
    assert rel(z["z01"], quad_partition(p, FlavorSet([], [a])).value) < 1e-10


def test_blocks_identity_two_bosons():
    p = EnsembleParams(2, 0)
    bl = Blocks(system_for(p, 6))
    e1, e2 = (0.3 + 0.9j) ** 2, (-0.5 + 0.4j) ** 2
    got = bl.z20(2, e1, e2)
    ref = quad_partition(p, FlavorSet([0.3 + 0.9j, -0.5 + 0.4j], [])).value
    assert rel(got, ref) < 1e-10


# ------------------------------------------------------------ k-point functions

def test_kpoint_frozen_value():
    p = EnsembleParams(3, 1)
    ref = 0.38377378589878847
    assert kpoint_det(None, p, [0.5, 1.1]) == pytest.approx(ref, rel=1e-10)
    assert kpoint_pf(None, p, [0.5, 1.1]) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("n,nu", [(2, 0), (3, 1), (5, 2)])
def test_kpoint_dual_forms(n, nu):
    p = EnsembleParams(n, nu)
    x = np.array([0.4, 0.9, 1.6])
    for k in range(1, min(3, n) + 1):
        d = kpoint_det(None, p, x[:k])
        f = kpoint_pf(None, p, x[:k])
        assert abs(d - f) <= 1e-8 * abs(d)
        assert kpoint_pf_identity_residual(None, p, x[:k]) < 1e-10


def test_kpoint_quadrature_and_errors():
    p = EnsembleParams(2, 1)
    assert kpoint_det(None, p, [0.7]) == pytest.approx(quad_kpoint(p, [0.7]), rel=1e-9)
    with pytest.raises(DimensionError):
        kpoint_det(None, p, [0.2, 0.4, 0.6])
    with pytest.raises(DomainError):
        kpoint_pf(None, p, [-0.5])


# ------------------------------------------------------------ generic real-line route

def test_generic_frozen_value():
    m = real_line_measure()
    fl = FlavorSet([0.2 + 0.7j], [0.5 - 0.3j, -1.1 + 0.2j])
    ref = 0.19928585051543524 - 0.21146285374912482j
    assert rel(partition_generic_pf(m, 2, fl).value, ref) < 1e-10
    assert rel(partition_generic_det(m, 2, fl).value, ref) < 1e-10


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("k1,k2", [(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (2, 1), (0, 3)])
def test_generic_matches_quadrature(N, k1, k2):
    m = real_line_measure()
    if N == 1 and (k1, k2) in [(2, 0)] or 2 * N + k2 - k1 < (k1 + k2) % 2:
        pytest.skip("inadmissible")
    fl = FlavorSet([0.2 + 0.7j, -0.6 - 0.5j][:k1], [0.5 - 0.3j, -1.1 + 0.2j, 0.3 + 0.4j][:k2])
    try:
        val = partition_generic_pf(m, N, fl).value
    except UnsupportedError:
        pytest.skip("inadmissible")
    assert rel(val, quad_generic(m, N, fl).value) < 1e-7
