"""
Solving Hu = f by exhaustion
============================

On the line the equation Δu = δ_5 has no decaying solution, and the stage
solutions on growing balls keep increasing.  With a mass term they settle.
A Rellich-type bound controls every stage.
"""

from hardyrellich.functions import FiniteFunction
from hardyrellich.graphs import LineGraph
from hardyrellich.instances import in_naturals, line_example
from hardyrellich.operators import SchrodingerOperator
from hardyrellich.poisson import Exhaustion, bound_report, exhaustion_solve

ex = line_example(0.5)
H = ex.operator
f = FiniteFunction.delta(5)
exh = Exhaustion.balls(H.graph, 1, 8, in_naturals)


def ratio(u):
    return bound_report(u, f, ex.g, ex.weight, H.measure, ex.gamma)


rep = exhaustion_solve(H, f, exh, domain=in_naturals, bound=ratio)
print("stage  size   u(5)        residual    bound ratio")
for i, (K, u, r, q) in enumerate(zip(exh, rep.stage_solutions, rep.residuals, rep.ratios), 1):
    print(f"  {i:>4}  {len(K):>4}  {u(5):10.4f}  {r:.1e}     {q:.4f}")
print(f"converged={rep.converged}, monotone={rep.monotone}")
print(rep.note)

massive = SchrodingerOperator(LineGraph(), potential=lambda x: 1.0)
rep = exhaustion_solve(massive, f, exh, domain=in_naturals)
print(f"\nwith q = 1: converged={rep.converged}, u(5) = {rep.u(5):.12f}, "
      f"residual {rep.stabilized_residual:.1e}")
