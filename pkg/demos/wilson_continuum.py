"""Ratio of the Wilson-smeared N_f-flavour function to its continuum limit."""

from pfrmt import continuum_check

configs = [[1.5, 2.5, 3.5, 4.5], [2.0, 3.0, 4.5, 5.5], [2.5, 3.5, 5.0, 6.5]]
for nu in (0, 1):
    chk = continuum_check(nu, configs, a_values=(0.4, 0.2, 0.1, 0.05))
    print(f"nu={nu}")
    for a, ratios, spread in zip(chk.a_values, chk.ratios, chk.spreads):
        print(f"  a={a:<5} ratios {' '.join(f'{r:.5f}' for r in ratios)}  spread {spread:.1e}")
