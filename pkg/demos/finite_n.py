"""Finite-n partition functions: determinant, Pfaffian and quadrature side by side."""

from pfrmt import EnsembleParams, FlavorSet, partition_det, partition_pf, quad_partition, valid_splits

params = EnsembleParams(3, 1)
flavors = FlavorSet([0.3 + 0.8j], [1.0 - 0.2j, 0.5j, -0.4 + 0.6j])

pf = partition_pf(None, params, flavors).value
quad = quad_partition(params, flavors).value
print(f"Pfaffian    {pf:.15f}")
print(f"quadrature  {quad:.15f}")
for split in valid_splits(params.n, flavors.k1, flavors.k2):
    det = partition_det(None, params, flavors, split).value
    print(f"det {split}  {det:.15f}  rel diff {abs(det - pf) / abs(pf):.1e}")
