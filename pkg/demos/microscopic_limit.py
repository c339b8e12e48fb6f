"""Approach of the scaled finite-n partition function to its microscopic limit."""

from pfrmt import FlavorSet, micro_partition_det, micro_partition_pf, scaled_finite_partition

flavors = FlavorSet([0.5 + 1.0j], [0.8 - 0.2j, 0.3 + 0.4j])
for nu in (0, 1):
    limit = micro_partition_pf(nu, flavors).value
    print(f"nu={nu}  det/pf - 1 = {abs(micro_partition_det(nu, flavors).value / limit - 1):.1e}")
    prev = None
    for n in (25, 50, 100, 200):
        z = scaled_finite_partition(n, nu, flavors)
        err = abs(z - limit) / abs(limit)
        ratio = "" if prev is None else f"  error ratio {prev / err:.2f}"
        print(f"  n={n:4d}  rel error {err:.3e}{ratio}")
        prev = err
