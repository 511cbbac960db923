import csv

import numpy as np
import pytest
import scipy.sparse.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.errors import DomainError, PositivityError
from hardyrellich.functions import FiniteFunction
from hardyrellich.graphs import LatticeGraph, LineGraph
from hardyrellich.instances import in_naturals, line_example
from hardyrellich.operators import SchrodingerOperator, laplacian, restrict_to_domain
from hardyrellich.poisson import (DENSE_LIMIT, Exhaustion, assemble, bound_report,
                                  exhaustion_solve, export_solution_csv, finite_solve,
                                  solve_system)

LINE = laplacian(LineGraph())


def line_green(n, source):
    """Dirichlet Green function of Δ on {1..n} (zero at 0 and n+1)."""
    def u(k):
        if source > n:
            return 0.0
        lo, hi = min(k, source), max(k, source)
        return lo * (n + 1 - hi) / (n + 1)
    return u


# ---------------------------------------------------------------- finite_solve


def test_three_vertex_hand_solve():
    # (2u1 - u2, 2u2 - u1 - u3, 2u3 - u2) = (0, 1, 0) has the solution (1/2, 1, 1/2)
    u = finite_solve(restrict_to_domain(LINE, {1, 2, 3}), FiniteFunction.delta(2))
    assert [u(k) for k in (1, 2, 3)] == pytest.approx([0.5, 1.0, 0.5], rel=1e-15)


def test_zero_rhs():
    u = finite_solve(restrict_to_domain(LINE, {1, 2, 3}), FiniteFunction())
    assert len(u) == 0


def test_single_vertex():
    H = SchrodingerOperator(LatticeGraph(2), lambda x: 2.0, lambda x: 0.5)
    f = FiniteFunction.delta((0, 0), 3.0)
    u = finite_solve(restrict_to_domain(H, {(0, 0)}), f)
    assert u((0, 0)) == pytest.approx(3.0 * 2.0 / (4 + 2.0 * 0.5), rel=1e-15)


def test_tridiagonal_oracle():
    n = 40
    u = finite_solve(restrict_to_domain(LINE, range(1, n + 1)), FiniteFunction.delta(5))
    oracle = line_green(n, 5)
    assert max(abs(u(k) - oracle(k)) for k in range(1, n + 1)) <= 1e-12


def test_not_positive_definite():
    H = SchrodingerOperator(LineGraph(), potential=lambda x: -3.0)
    with pytest.raises(PositivityError):
        finite_solve(restrict_to_domain(H, {1, 2, 3}), FiniteFunction.delta(2))
    big = restrict_to_domain(H, range(1, DENSE_LIMIT + 50))
    with pytest.raises(PositivityError):
        finite_solve(big, FiniteFunction.delta(2))


def test_needs_finite_window():
    with pytest.raises(DomainError):
        finite_solve(restrict_to_domain(LINE, in_naturals), FiniteFunction.delta(2))


def test_iterative_path_matches_direct_solver():
    rng = np.random.default_rng(0)
    n = DENSE_LIMIT + 500
    m = rng.uniform(0.5, 2.0, n)
    H = SchrodingerOperator(LineGraph(), lambda k: float(m[k - 1]), lambda k: 0.01)
    A, _ = assemble(H, list(range(1, n + 1)))
    b = rng.uniform(-1, 1, n)
    x = solve_system(A, b)
    ref = scipy.sparse.linalg.spsolve(A.tocsc(), b)
    assert np.max(np.abs(x - ref)) <= 1e-9 * np.max(np.abs(ref))
    assert np.max(np.abs(A @ x - b)) <= 1e-10 * (1 + np.max(np.abs(b)))


def test_assembly_is_symmetric():
    H = SchrodingerOperator(LineGraph(), lambda k: 1 + 1 / k if k else 2.0, lambda k: 0.3)
    A, _ = assemble(H, list(range(1, 30)))
    assert (A - A.T).count_nonzero() == 0


# ---------------------------------------------------------------- exhaustions


def test_exhaustion_validation():
    g = LineGraph()
    with pytest.raises(DomainError):
        Exhaustion(g, [])
    with pytest.raises(DomainError, match="contain"):
        Exhaustion(g, [[1, 2], [2, 3]])
    with pytest.raises(DomainError, match="connected"):
        Exhaustion(g, [[1], [1, 3]])
    with pytest.raises(DomainError, match="empty"):
        Exhaustion(g, [[]])
    e = Exhaustion.balls(g, 1, 4, in_naturals)
    assert [len(K) for K in e] == [3, 5, 9, 17]
    assert e.covers(17) and not e.covers(18) and len(e) == 4


def _solve(f, stages=8, H=LINE, bound=None):
    exh = Exhaustion.balls(H.graph, 1, stages, in_naturals)
    return exh, exhaustion_solve(H, f, exh, domain=in_naturals, bound=bound)


def test_line_delta_stages_match_oracle():
    exh, rep = _solve(FiniteFunction.delta(5))
    assert rep.monotone and not rep.converged
    for K, u in zip(exh, rep.stage_solutions):
        oracle = line_green(len(K), 5)
        assert max(abs(u(k) - oracle(k)) for k in K) <= 1e-11 * len(K)
    for a, b in zip(rep.stage_solutions, rep.stage_solutions[1:]):
        assert all(b(k) >= a(k) - 1e-12 for k in range(1, 40))
    assert max(rep.residuals) <= 1e-12
    assert rep.stabilized == exh.stages[-3]
    assert "not unique" in rep.note


def test_zero_rhs_every_stage():
    _, rep = _solve(FiniteFunction(), stages=4)
    assert all(len(u) == 0 for u in rep.stage_solutions[:1])
    assert rep.u(3) == 0.0 and rep.converged


def test_massive_operator_converges():
    H = SchrodingerOperator(LineGraph(), potential=lambda x: 1.0)
    _, rep = _solve(FiniteFunction.delta(5), stages=8, H=H)
    assert rep.converged and rep.stabilized_residual <= 1e-12


def test_sign_split_bit_for_bit():
    f = FiniteFunction({3: 1.0, 9: 2.5})
    exh, rep = _solve(f, stages=5)
    direct = finite_solve(restrict_to_domain(LINE, exh.stages[-1]), f)
    assert dict(rep.u) == dict(direct)


def test_mixed_sign_rhs():
    f = FiniteFunction({3: 1.0, 9: -2.0})
    exh, rep = _solve(f, stages=5)
    up = finite_solve(restrict_to_domain(LINE, exh.stages[-1]), f.positive_part())
    down = finite_solve(restrict_to_domain(LINE, exh.stages[-1]), f.negative_part())
    assert dict(rep.u) == dict(up - down)
    assert max(rep.residuals) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.floats(0, 5), st.floats(0, 5))
def test_linearity(x, y, a, b):
    f, h = FiniteFunction.delta(x), FiniteFunction.delta(y, 0.5)
    _, rf = _solve(f, stages=5)
    _, rh = _solve(h, stages=5)
    _, rc = _solve(f.scale(a) + h.scale(b), stages=5)
    for k in rc.stabilized:
        expected = a * rf.u(k) + b * rh.u(k)
        assert abs(rc.u(k) - expected) <= 1e-9 * max(1.0, abs(expected))


# ---------------------------------------------------------------- bound


def test_bound_report():
    line = line_example(0.5)
    m = line.operator.measure
    assert bound_report(FiniteFunction(), FiniteFunction(), line.g, line.weight, m, 0.3) == 0.0
    with pytest.raises(DomainError, match="degenerate"):
        bound_report(FiniteFunction.delta(2), FiniteFunction(), line.g, line.weight, m, 0.3)
    with pytest.raises(DomainError):
        bound_report(FiniteFunction(), FiniteFunction(), line.g, line.weight, m, 1.0)


def test_bound_ratio_per_stage():
    line = line_example(0.5)
    f = FiniteFunction.delta(5)
    _, rep = _solve(f, bound=lambda u: bound_report(u, f, line.g, line.weight,
                                                   line.operator.measure, line.gamma))
    ratios = rep.ratios
    assert max(ratios) <= 1.0
    assert all(b >= a - 1e-12 for a, b in zip(ratios, ratios[1:]))


def test_per_stage_norm_bound_for_sampled_rhs():
    line = line_example(0.5)
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = FiniteFunction({int(k): float(v) for k, v in
                            zip(rng.choice(np.arange(1, 30), 4, replace=False),
                                rng.uniform(0, 1, 4))})
        _, rep = _solve(f, stages=5, bound=lambda u, f=f: bound_report(
            u, f, line.g, line.weight, line.operator.measure, line.gamma))
        assert max(rep.ratios) <= 1.0


def test_solution_csv(tmp_path):
    exh, rep = _solve(FiniteFunction.delta(5), stages=3)
    path = tmp_path / "u.csv"
    export_solution_csv(rep.u, exh.stages[-1], path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["vertex", "u"] and len(rows) == 1 + len(exh.stages[-1])
    assert float(rows[5][1]) == rep.u(5)
    d = rep.to_dict()
    assert d["n_stages"] == 3 and d["stages"][0]["size"] == 3
