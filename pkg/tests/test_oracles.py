import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from pfrmt.ensemble import EnsembleParams
from pfrmt.errors import UnsupportedError, ValidationError
from pfrmt.flavors import FlavorSet
from pfrmt.oracles import (
    McConfig,
    dirac_matrix,
    mc_partition,
    quad_kpoint,
    quad_partition,
    sample_matrix,
    chunk_generator,
)
from pfrmt.partition import partition_pf


def test_quadrature_frozen_values():
    got = quad_partition(EnsembleParams(2, 1), FlavorSet([0.3 + 0.8j], [1.0 - 0.2j, 0.5j])).value
    assert abs(got - (0.7929986552770685 - 0.27562914666769195j)) < 1e-12
    assert quad_kpoint(EnsembleParams(3, 1), [0.5, 1.1]) == pytest.approx(0.38377378589878847, rel=1e-12)


def test_quadrature_one_point_normalised():
    # the one-point function integrates to n over the eigenvalue measure
    p = EnsembleParams(2, 0)
    x = np.linspace(1e-6, 30, 4001)
    r = np.array([quad_kpoint(p, [v]) for v in x])
    assert trapezoid(r, x) == pytest.approx(2.0, rel=1e-4)


def test_mc_deterministic_across_threads():
    p = EnsembleParams(2, 1)
    fl = FlavorSet([], [0.7 + 0.1j, -0.3 + 0.5j])
    cfg = McConfig(samples=20_000, seed=42, chunk=2_000)
    a = mc_partition(p, fl, cfg, threads=1)
    b = mc_partition(p, fl, cfg, threads=4)
    assert a.value == b.value and a.stderr == b.stderr


def test_mc_seed_changes_stream():
    p = EnsembleParams(2, 0)
    fl = FlavorSet([], [0.7 + 0.1j])
    a = mc_partition(p, fl, McConfig(samples=2_000, seed=1, chunk=500)).value
    b = mc_partition(p, fl, McConfig(samples=2_000, seed=2, chunk=500)).value
    assert a != b


def test_mc_agrees_with_pfaffian():
    p = EnsembleParams(2, 1)
    fl = FlavorSet([], [0.9 + 0.2j])
    r = mc_partition(p, fl, McConfig(samples=100_000, seed=7, chunk=10_000))
    exact = partition_pf(None, p, fl).value
    assert abs(r.value - exact) < 4 * r.stderr


def test_sampled_spectrum_scale():
    # <tr W W^dagger> = n (n + nu) / (alpha c)
    p = EnsembleParams(3, 1, alpha=2.0)
    w = sample_matrix(p, chunk_generator(0, 0), 20_000)
    mean = np.mean(np.einsum("sij,sij->s", w, w.conj()).real)
    assert mean == pytest.approx(3 * 4 / 2.0, rel=2e-2)
    d = dirac_matrix(w[0])
    assert np.allclose(d, -d.conj().T)


def test_mc_config_validation():
    with pytest.raises(ValidationError):
        McConfig(samples=0)
    with pytest.raises(ValidationError):
        McConfig(chunk=-1)
    with pytest.raises(ValidationError):
        McConfig(seed=-3)
    assert McConfig(samples=25, chunk=10).n_chunks == 3


def test_mc_rejects_nonlinear_potential():
    p = EnsembleParams(2, 0, potential=(1.0, 0.5))
    with pytest.raises(UnsupportedError):
        mc_partition(p, FlavorSet([], [0.5]), McConfig(samples=10, chunk=10))


def test_mc_bosonic_warning():
    p = EnsembleParams(2, 0)
    r = mc_partition(p, FlavorSet([0.4 + 0.9j], []), McConfig(samples=1000, chunk=500))
    assert any("bosonic" in w for w in r.warnings)
    assert math.isfinite(r.stderr)
