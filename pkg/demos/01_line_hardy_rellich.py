"""
Hardy and Rellich on the half line
==================================

Walk through the standard example on N = {1, 2, ...}: the optimal Hardy
weight, the Rellich constant for g(n) = n^α, and a falsification sweep.
"""

import math

from hardyrellich.eikonal import gamma_power
from hardyrellich.hardy import line_weight
from hardyrellich.instances import line_example

# the optimal Hardy weight of the line with Dirichlet condition at 0;
# k^2 w(k) tends to 1/4 from above
for k in (1, 2, 10, 100, 1000):
    print(f"w({k:>4}) = {line_weight(k):.10f}   k^2 w(k) = {k * k * line_weight(k):.6f}")
print("w(1) == 2 - sqrt(2):", math.isclose(line_weight(1), 2 - math.sqrt(2)))

ex = line_example(0.5)

# Hardy sweep: random finitely supported test functions must never beat the weight
hardy = ex.hardy_sweep(500, seed=0)
print(f"\nHardy sweep: {hardy.n_samples} samples, pass={hardy.passed}, "
      f"worst normalized margin {hardy.worst_normalized:.4f}")

# the admissible constant for g = n^{1/2} at eps = 2^{-1/2}
gamma = gamma_power(0.5, 2 ** -0.5)
print(f"\ngamma for alpha = 1/2: {gamma:.7f}  (example uses {ex.gamma:.7f})")

rellich = ex.rellich_sweep(500, seed=0)
print(f"Rellich sweep: pass={rellich.passed}, eikonal={rellich.eikonal_passed}, "
      f"chain consistent={rellich.chain_consistent}")
print("margin quantiles:", {k: round(v, 4) for k, v in rellich.quantiles().items()})
