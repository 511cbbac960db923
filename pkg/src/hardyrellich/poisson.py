"""Solving ``Hu = f`` by exhaustion with finite Dirichlet problems.

On a finite connected ``K`` the Dirichlet problem ``H u = f`` on ``K``,
``u = 0`` off ``K`` is the linear system

    ``(deg(x) + m(x) q(x)) u(x) - Σ_{y in K} b(x, y) u(y) = m(x) f(x)``,

which is symmetric (this is ``m·H`` restricted to ``K``) and positive
definite exactly when ``H`` is positive on ``K``.  For ``f >= 0`` the
solutions increase along an exhaustion ``K_1 ⊆ K_2 ⊆ ...``; a signed ``f`` is
split into positive and negative parts, each solved monotonically.  The limit
is the minimal solution; solutions of ``Hu = f`` are not unique in general.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import AssemblyError, DomainError, PositivityError
from .functions import FiniteFunction
from .graphs import WeightedGraph, ball, is_connected
from .operators import GraphDomain, SchrodingerOperator, restrict_to_domain, schrodinger_apply

Vertex = Hashable

DENSE_LIMIT = 2000
MONOTONE_SLACK = 1e-12
NON_UNIQUENESS_NOTE = ("solutions of Hu = f are not unique in general; this is the minimal "
                       "solution of each sign part produced by the monotone scheme")


# --------------------------------------------------------------------------
# Exhaustions


class Exhaustion:
    """Nested connected finite vertex sets ``K_1 ⊆ K_2 ⊆ ...``.

    Parameters
    ----------
    graph : WeightedGraph
        Used for the connectedness check.
    stages : sequence of iterables
        The sets, smallest first.
    """

    def __init__(self, graph: WeightedGraph, stages: Sequence[Iterable[Vertex]]):
        self.graph = graph
        self.stages = [tuple(sorted(set(s), key=_order)) for s in stages]
        if not self.stages:
            raise DomainError("an exhaustion needs at least one stage")
        prev: set = set()
        for k, K in enumerate(self.stages):
            if not K:
                raise DomainError(f"stage {k} is empty")
            ks = set(K)
            if not prev <= ks:
                raise DomainError(f"stage {k} does not contain stage {k - 1}")
            if not is_connected(graph, ks):
                raise DomainError(f"stage {k} is not connected")
            prev = ks

    @classmethod
    def balls(cls, graph: WeightedGraph, root: Vertex, n_stages: int,
              contains: Callable[[Vertex], bool] | None = None) -> Exhaustion:
        """Balls of radius ``2^k``, ``k = 1..n_stages``, around ``root`` inside the domain."""
        return cls(graph, [ball(graph, root, 2 ** k, contains) for k in range(1, n_stages + 1)])

    def __len__(self):
        return len(self.stages)

    def __iter__(self):
        return iter(self.stages)

    def covers(self, x: Vertex) -> bool:
        return x in set(self.stages[-1])


def _order(x):
    return (0, x) if isinstance(x, (int, tuple)) else (1, repr(x))


# --------------------------------------------------------------------------
# Finite Dirichlet problems


def assemble(H: SchrodingerOperator, K: Sequence[Vertex]):
    """Symmetric matrix of ``m·H`` on functions supported in ``K``, as CSR, plus the index."""
    index = {x: i for i, x in enumerate(K)}
    rows, cols, vals = [], [], []
    for i, x in enumerate(K):
        diag = [H.measure(x) * H.potential(x)]
        for y, b in H.graph.neighbors(x):
            diag.append(b)
            j = index.get(y)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(-b)
        rows.append(i)
        cols.append(i)
        vals.append(math.fsum(diag))
    n = len(K)
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)), index


def _pcg(A, b, tol=1e-14, maxiter=None):
    """Jacobi-preconditioned CG that raises on nonpositive curvature.

    Written out because the library CG does not report curvature, which is
    how a non-positive-definite system is detected here.
    """
    n = b.size
    maxiter = maxiter or 10 * n
    dinv = 1.0 / A.diagonal()
    if np.any(~np.isfinite(dinv)) or np.any(dinv <= 0):
        raise PositivityError("system has a nonpositive diagonal entry; H is not positive on K")
    x = np.zeros(n)
    r = b.copy()
    z = dinv * r
    p = z.copy()
    rz = r @ z
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return x
    for _ in range(maxiter):
        Ap = A @ p
        curv = p @ Ap
        if not curv > 0:
            raise PositivityError("nonpositive curvature in CG; H is not positive on K")
        step = rz / curv
        x += step * p
        r -= step * Ap
        if np.linalg.norm(r) <= tol * bnorm:
            return x
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise PositivityError("CG did not converge; H may not be positive on K")


def solve_system(A, rhs: np.ndarray) -> np.ndarray:
    """Dense Cholesky up to ``DENSE_LIMIT`` unknowns, preconditioned CG above."""
    if A.shape[0] <= DENSE_LIMIT:
        try:
            cf = scipy.linalg.cho_factor(A.toarray(), lower=True)
        except np.linalg.LinAlgError:
            raise PositivityError("Cholesky factorization failed; H is not positive on K") from None
        return scipy.linalg.cho_solve(cf, rhs)
    return _pcg(A, rhs)


def _domain_vertices(domain: GraphDomain) -> tuple:
    if domain.window is None:
        raise DomainError("finite_solve needs a domain with a finite vertex window")
    return domain.window


def finite_solve(domain: GraphDomain, f: Callable[[Vertex], float]) -> FiniteFunction:
    """Solve ``H u = f`` on the finite set ``K`` of ``domain`` with ``u = 0`` off ``K``."""
    K = _domain_vertices(domain)
    H = domain.parent
    A, _ = assemble(H, K)
    rhs = np.array([H.measure(x) * f(x) for x in K])
    if not rhs.any():
        return FiniteFunction()
    u = solve_system(A, rhs)
    return FiniteFunction({x: float(v) for x, v in zip(K, u)})


def dirichlet_residual(H: SchrodingerOperator, u: FiniteFunction, f: Callable,
                       vertices: Iterable[Vertex]) -> float:
    """``sup_x |Hu(x) - f(x)|`` over ``vertices`` (u extended by zero)."""
    return max((abs(schrodinger_apply(H, u, x) - f(x)) for x in vertices), default=0.0)


# --------------------------------------------------------------------------
# Exhaustion scheme


@dataclass
class StageRecord:
    size: int
    residual: float
    increment: float | None
    ratio: float | None = None

    def to_dict(self) -> dict:
        return {"size": self.size, "residual": self.residual, "increment": self.increment,
                "ratio": self.ratio}


@dataclass
class SolveReport:
    """Outcome of :func:`exhaustion_solve`.

    ``converged`` is false when the increments never dropped below ``stop``;
    that is a report, not an error, and ``increments`` is the growth profile.
    """

    u: FiniteFunction
    stages: list
    monotone: bool
    converged: bool
    stop: float
    stabilized: tuple
    stabilized_residual: float
    stage_solutions: list = field(default_factory=list, repr=False)
    note: str = NON_UNIQUENESS_NOTE

    @property
    def residuals(self) -> list:
        return [s.residual for s in self.stages]

    @property
    def increments(self) -> list:
        return [s.increment for s in self.stages]

    @property
    def ratios(self) -> list:
        return [s.ratio for s in self.stages]

    def to_dict(self) -> dict:
        return {
            "n_stages": len(self.stages),
            "stages": [s.to_dict() for s in self.stages],
            "monotone": self.monotone,
            "converged": self.converged,
            "stop": self.stop,
            "stabilized_size": len(self.stabilized),
            "stabilized_residual": self.stabilized_residual,
            "max_stage_residual": max(self.residuals, default=0.0),
            "note": self.note,
        }


def interior(H: SchrodingerOperator, K: Sequence[Vertex], domain: Callable | None) -> list:
    """Vertices of ``K`` whose neighbours inside the domain all lie in ``K``."""
    ks = set(K)
    return [x for x in K if all(y in ks or (domain is not None and not domain(y))
                                for y, _ in H.graph.neighbors(x))]


def exhaustion_solve(H: SchrodingerOperator, f: Callable[[Vertex], float], exhaustion: Exhaustion,
                     stop: float = 1e-10, domain: Callable[[Vertex], bool] | None = None,
                     bound: Callable[[FiniteFunction], float] | None = None) -> SolveReport:
    """Monotone exhaustion solution of ``Hu = f``.

    Parameters
    ----------
    H : SchrodingerOperator
        Positive on every stage (checked by the factorization).
    f : callable
        Right-hand side, evaluated on each stage.
    exhaustion : Exhaustion
        The stages ``K_k``; they must lie in ``domain`` if one is given.
    stop : float
        Convergence threshold for the increments ``sup_{K_k} (u^±_{k+1} - u^±_k)`` of
        both sign parts; a finitely supported ``f`` must lie inside ``K_{k+1}``.
    bound : callable, optional
        ``u_k -> ratio`` recorded per stage (see :func:`bound_report`).
    """
    parts = {}
    for sign in (1, -1):
        def part(x, s=sign):
            v = s * f(x)
            return v if v > 0 else 0.0
        parts[sign] = part

    stages: list[StageRecord] = []
    solutions: list[FiniteFunction] = []
    prev = {1: None, -1: None}
    prev_u = None
    prev_K: tuple = ()
    monotone = True
    converged = False
    support = f.support() if isinstance(f, FiniteFunction) else None
    for k, K in enumerate(exhaustion):
        if domain is not None:
            for x in K:
                if not domain(x):
                    raise DomainError(f"stage {k} leaves the domain at {x!r}")
        dom = restrict_to_domain(H, K)
        sol = {}
        part_inc = []
        for sign, part in parts.items():
            sol[sign] = finite_solve(dom, part)
            p = prev[sign]
            if p is not None:
                scale = max(1.0, sol[sign].sup_norm())
                worst = min((sol[sign](x) - p(x) for x in prev_K), default=0.0)
                if worst < -MONOTONE_SLACK * scale:
                    raise AssemblyError(f"stage {k} decreased the {'+' if sign > 0 else '-'} "
                                        f"part by {-worst:.3e}; the assembly is inconsistent")
                part_inc.append(max((sol[sign](x) - p(x) for x in prev_K), default=0.0))
            prev[sign] = sol[sign]
        u = sol[1] - sol[-1] if sol[-1] else sol[1]
        solutions.append(u)
        res = dirichlet_residual(H, u, f, interior(H, K, domain))
        inc = None
        if prev_u is not None:
            inc = max((abs(u(x) - prev_u(x)) for x in prev_K), default=0.0)
            # stop on the monotone parts (their changes can cancel in u), and never
            # before a finitely supported right-hand side is inside the stage
            reached = support is None or support <= set(K)
            if reached and max(part_inc) < stop:
                converged = True
        ratio = bound(u) if bound is not None else None
        stages.append(StageRecord(len(K), res, inc, ratio))
        prev_u, prev_K = u, K
        if converged:
            break
    last = len(stages) - 1
    stab = exhaustion.stages[max(0, last - 2)]
    stab_res = dirichlet_residual(H, prev_u, f, stab)
    return SolveReport(prev_u, stages, monotone, converged, stop, stab, stab_res, solutions)


# --------------------------------------------------------------------------
# Norm bound


def bound_report(u: FiniteFunction, f: FiniteFunction, g: Callable, w: Callable, m: Callable,
                 gamma: float) -> float:
    """``‖u‖_{gwm} (1 - γ) / ‖f‖_{(g/w)m}``; at most 1 when the Rellich inequality holds."""
    if not 0 < gamma < 1:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    nf = math.sqrt(math.fsum(g(x) / w(x) * m(x) * v * v for x, v in f.items()))
    nu = math.sqrt(math.fsum(g(x) * w(x) * m(x) * v * v for x, v in u.items()))
    if nf == 0:
        if nu == 0:
            return 0.0
        raise DomainError("degenerate input: ‖f‖ = 0 but u is not zero")
    return nu * (1.0 - gamma) / nf


def export_solution_csv(u: FiniteFunction, vertices: Iterable[Vertex], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["vertex", "u"])
        for x in vertices:
            label = " ".join(map(str, x)) if isinstance(x, tuple) else x
            out.writerow([label, repr(u(x))])
