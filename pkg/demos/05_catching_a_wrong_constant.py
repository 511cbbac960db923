"""
Catching a wrong constant
=========================

Random test functions rarely find violations of an inequality that is only
barely false.  Here g = n^0.99 with γ = 0.05 is not a valid Rellich pair; the
sampled sweep alone stays quiet, while the extremal test function from a
generalized eigenproblem exposes it immediately.
"""

from hardyrellich.rellich import extremal_test_function, rellich_margin, rellich_sweep
from hardyrellich.suites import broken_line_instance

line, broken = broken_line_instance()
print(f"broken instance: g(n) = n^0.99, gamma = {broken.gamma}")

plain = rellich_sweep(broken, line.sampler(), 300, seed=0)
print(f"sampled sweep alone: pass={plain.passed}, worst normalized {plain.worst_normalized:.4f}")

for n in (50, 200, 400):
    ext = extremal_test_function(broken, list(range(1, n + 1)))
    print(f"extremal on {{1..{n}}}: ratio {ext.ratio:.4f}, violates={ext.violates(broken.gamma)}")

t = rellich_margin(broken, ext.phi)
print(f"margin of the extremal: {t.margin:.4f} (lhs {t.lhs:.4f}, rhs {t.rhs:.4f})")

rep = rellich_sweep(broken, line.sampler(), 300, seed=0, extra=(ext.phi,))
print(f"sweep with the extremal added: pass={rep.passed}, eikonal={rep.eikonal_passed}")
