"""
Admissible constants and how sharp they are
===========================================

The power family θ(t) = t^α and the log family θ(t) = log(1 + t/c) each come
with a constant γ.  We print γ over α, then lower it by 10% and watch the
admissibility inequality break.
"""

from hardyrellich.eikonal import (AdmissibleFamily, admissibility_check, corollary_constants,
                                  gamma_log, gamma_power)

EPS = 2 ** -0.5

print(" alpha   gamma(alpha)   alpha^2   check   0.9*gamma")
for i in range(1, 10):
    a = i / 10
    g = gamma_power(a, EPS)
    fam = AdmissibleFamily.power(a)
    ok = admissibility_check(fam, EPS, g).passed()
    probe = admissibility_check(fam, EPS, 0.9 * g)
    print(f"  {a:.1f}   {g:.8f}   {a * a:.4f}    {'ok' if ok else 'FAIL'}    "
          f"violated by {probe.worst:.2e}")

print("\nlog family (product floor off for the probe)")
for c in (0.5, 1.0, 4.0):
    g = gamma_log(c, EPS)
    fam = AdmissibleFamily.log(c)
    probe = admissibility_check(fam, EPS, 0.9 * g, product_floor=False)
    print(f"  c = {c:<4} gamma = {g:.6f}   worst point of 0.9*gamma at {probe.worst_at}")

# on a graph of degree bound D the natural choice is eps = D^{-1/2}
print("\nlattice constants, alpha = 1/2")
for d in (1, 2, 3, 4):
    print(f"  Z^{d}: gamma = {corollary_constants('power', 2 * d, alpha=0.5):.6f}")
