"""Laplacians, Schrödinger operators and the algebraic identities behind them.

Conventions
-----------
``H = (1/m) Δ + q`` with ``Δf(x) = Σ_y b(x,y) (f(x) - f(y))``.  Finite sums are
accumulated with :func:`math.fsum`.  Identity checks return a
:class:`Residual` pairing the discrepancy with the instance scale
``Σ |summands|`` so tolerances can be stated relative to it.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, PositivityError
from .functions import ONE, ZERO, FiniteFunction, LazyFunction
from .graphs import (InducedGraph, ProductWeightGraph, SupergraphWithInfinity,
                     WeightedGraph)

Vertex = Hashable
fsum = math.fsum


class Residual(NamedTuple):
    residual: float
    scale: float

    @property
    def relative(self) -> float:
        return self.residual / self.scale if self.scale > 0 else self.residual

    def within(self, tol: float) -> bool:
        return self.residual <= tol * max(self.scale, 1.0)


@dataclass(frozen=True)
class SchrodingerOperator:
    """``H = (1/m) Δ + q`` for a graph ``b``, measure ``m`` and potential ``q``."""

    graph: WeightedGraph
    measure: Callable[[Vertex], float] = ONE
    potential: Callable[[Vertex], float] = ZERO

    def __call__(self, f, x):
        return schrodinger_apply(self, f, x)

    @property
    def is_laplacian(self) -> bool:
        return self.measure is ONE and self.potential is ZERO


def laplacian(graph: WeightedGraph) -> SchrodingerOperator:
    return SchrodingerOperator(graph)


# --------------------------------------------------------------------------
# Pointwise operators


def laplacian_apply(graph: WeightedGraph, f: Callable, x: Vertex) -> float:
    """``Δf(x) = Σ_y b(x,y)(f(x) - f(y))``."""
    fx = f(x)
    return fsum(b * (fx - f(y)) for y, b in graph.neighbors(x))


def schrodinger_apply(H: SchrodingerOperator, f: Callable, x: Vertex) -> float:
    """``Hf(x) = Δf(x)/m(x) + q(x) f(x)``."""
    fx = f(x)
    lap = fsum(b * (fx - f(y)) for y, b in H.graph.neighbors(x))
    return lap / H.measure(x) + H.potential(x) * fx


def grad_norm_sq(graph: WeightedGraph, f: Callable, x: Vertex) -> float:
    """``|∇f|²(x) = ½ Σ_y b(x,y)(f(x) - f(y))²``."""
    fx = f(x)
    return 0.5 * fsum(b * (fx - f(y)) ** 2 for y, b in graph.neighbors(x))


def weighted_norm_sq(f: FiniteFunction, weight: Callable) -> float:
    """``Σ_{x ∈ supp f} weight(x) f(x)²``; the weight must be positive there."""
    terms = []
    for x, v in f.items():
        wx = weight(x)
        if not wx > 0:
            raise PositivityError("weight is not strictly positive", x, wx)
        terms.append(wx * v * v)
    return fsum(terms)


def apply_on(H: SchrodingerOperator, f: Callable, vertices: Iterable[Vertex]) -> FiniteFunction:
    """``Hf`` evaluated on a finite vertex set, as a finitely supported function."""
    return FiniteFunction({x: schrodinger_apply(H, f, x) for x in vertices})


# --------------------------------------------------------------------------
# Quadratic forms


def energy_form(H: SchrodingerOperator, phi: FiniteFunction) -> float:
    """``Σ_x |∇φ|²(x) + Σ_x m q φ²`` summed pointwise over supp φ and its neighbours."""
    vertices = H.graph.neighborhood(phi.support())
    grad = fsum(grad_norm_sq(H.graph, phi, x) for x in vertices)
    pot = fsum(H.measure(x) * H.potential(x) * v * v for x, v in phi.items())
    return grad + pot


def dirichlet_sum(graph: WeightedGraph, phi: FiniteFunction) -> float:
    """``½ Σ_{x,y} b(x,y)(φ(x) - φ(y))²`` accumulated edge by edge from the support.

    Never enumerates neighbours of vertices outside supp φ, so it also works on
    graphs such as :class:`SupergraphWithInfinity` where that is impossible.
    """
    supp = phi.support()
    terms = []
    for x, v in phi.items():
        for y, b in graph.neighbors(x):
            d = v - phi(y)
            # ordered pairs inside supp are visited twice, boundary pairs once
            terms.append((0.5 if y in supp else 1.0) * b * d * d)
    return fsum(terms)


def greens_formula_residual(H: SchrodingerOperator, phi: FiniteFunction,
                            f: Callable) -> Residual:
    """Compare the three members of Green's formula.

    ``½ Σ b ∇φ ∇f + Σ m q φ f``, ``Σ m φ Hf`` and ``Σ m f Hφ`` are assembled in
    three different orders; the maximum pairwise discrepancy is returned.
    """
    g, m, q = H.graph, H.measure, H.potential
    supp = phi.support()
    first = []
    for x, v in phi.items():
        fx = f(x)
        for y, b in g.neighbors(x):
            first.append((0.5 if y in supp else 1.0) * b * (v - phi(y)) * (fx - f(y)))
        first.append(m(x) * q(x) * v * fx)
    second = [m(x) * v * schrodinger_apply(H, f, x) for x, v in phi.items()]
    third = [m(x) * f(x) * schrodinger_apply(H, phi, x) for x in g.neighborhood(supp)]
    sums = [fsum(first), fsum(second), fsum(third)]
    scale = max(fsum(abs(t) for t in ts) for ts in (first, second, third))
    res = max(abs(a - b) for a in sums for b in sums)
    return Residual(res, scale)


def main_identity_residual(graph: WeightedGraph, phi: FiniteFunction,
                           f: Callable) -> Residual:
    """Check ``Σ (f²φ) Δφ = Σ |∇(fφ)|² - ½ Σ_{x,y} b φ(x)φ(y)(f(x)-f(y))²``."""
    lhs_terms = [f(x) ** 2 * v * laplacian_apply(graph, phi, x) for x, v in phi.items()]
    fphi = FiniteFunction({x: f(x) * v for x, v in phi.items()})
    grad_terms = [grad_norm_sq(graph, fphi, x) for x in graph.neighborhood(fphi.support())]
    cross_terms = []
    for x, v in phi.items():
        fx = f(x)
        for y, b in graph.neighbors(x):
            w = phi(y)
            if w != 0:
                cross_terms.append(0.5 * b * v * w * (fx - f(y)) ** 2)
    lhs = fsum(lhs_terms)
    rhs = fsum(grad_terms) - fsum(cross_terms)
    scale = fsum(abs(t) for t in lhs_terms) + fsum(grad_terms) + fsum(abs(t) for t in cross_terms)
    return Residual(abs(lhs - rhs), scale)


# --------------------------------------------------------------------------
# Ground-state transform and the supergraph with a vertex at infinity


@dataclass(frozen=True)
class GroundStateTransform:
    """Graph ``b(u⊗u)``, potential ``Hu/u`` and measure ``u² m``."""

    graph: WeightedGraph
    potential: Callable
    measure: Callable
    u: Callable

    def operator(self) -> SchrodingerOperator:
        return SchrodingerOperator(self.graph, self.measure, self.potential)


def _checked_positive(u: Callable, what: str) -> Callable:
    def fn(x):
        v = u(x)
        if not v > 0:
            raise PositivityError(f"{what} is not strictly positive", x, v)
        return v
    return fn


def ground_state_transform(H: SchrodingerOperator, u: Callable) -> GroundStateTransform:
    """Conjugate ``H`` by a function ``u`` strictly positive on the working window.

    For finitely supported φ the transformed energy at φ equals the original
    energy at ``uφ``; :func:`ground_state_residual` checks this.
    """
    upos = _checked_positive(u, "ground-state function")

    def unonneg(x):
        v = u(x)
        if v < 0:
            raise PositivityError("ground-state function is negative", x, v)
        return v

    potential = LazyFunction(lambda x: schrodinger_apply(H, u, x) / upos(x), name="Hu/u")
    measure = LazyFunction(lambda x: upos(x) ** 2 * H.measure(x), name="u^2 m")
    # u may vanish off the working domain (e.g. on a Dirichlet set); such edges drop out
    return GroundStateTransform(ProductWeightGraph(H.graph, unonneg), potential, measure, upos)


def ground_state_residual(H: SchrodingerOperator, gst: GroundStateTransform,
                          phi: FiniteFunction) -> Residual:
    transformed = energy_form(gst.operator(), phi)
    original = energy_form(H, phi * gst.u)
    return Residual(abs(transformed - original), abs(transformed) + abs(original))


def extend_with_infinity(graph: WeightedGraph, measure: Callable, u: Callable,
                         hu: Callable) -> SupergraphWithInfinity:
    """Add a vertex at infinity with ``b(x, ∞) = m(x) u(x) Hu(x)``.

    ``hu`` must be nonnegative (``u`` superharmonic); the measure is never
    evaluated at the new vertex.
    """
    def kill(x):
        h = hu(x)
        if h < 0:
            raise PositivityError("Hu is negative, u is not superharmonic", x, h)
        return measure(x) * u(x) * h
    return SupergraphWithInfinity(graph, kill)


# --------------------------------------------------------------------------
# Dirichlet restriction to a subset


@dataclass(frozen=True)
class GraphDomain:
    """Restriction of ``H`` to ``Y`` with the Dirichlet potential ``q^D_Y``.

    ``restricted`` is the operator ``(1/m) Δ_Y + q + q^D_Y / m`` on the induced
    graph; it agrees with the parent on functions supported in ``Y``.
    """

    parent: SchrodingerOperator
    contains: Callable[[Vertex], bool]
    induced: InducedGraph
    dirichlet_potential: Callable
    restricted: SchrodingerOperator
    window: tuple | None = None

    def __contains__(self, x):
        return self.contains(x)

    def check_supported(self, phi: FiniteFunction) -> None:
        for x in phi.support():
            if not self.contains(x):
                raise DomainError(f"function escapes the domain at vertex {x!r}")


def _as_predicate(Y) -> tuple[Callable[[Vertex], bool], tuple | None]:
    if callable(Y):
        return Y, None
    members = frozenset(Y)
    return members.__contains__, tuple(sorted(members, key=repr))


def restrict_to_domain(H: SchrodingerOperator, Y, window: Iterable | None = None) -> GraphDomain:
    """Build the :class:`GraphDomain` for a subset given as predicate or finite set."""
    contains, win = _as_predicate(Y)
    if window is not None:
        win = tuple(window)
    g = H.graph

    def qd(x):
        return fsum(b for y, b in g.neighbors(x) if not (g.has_vertex(y) and contains(y)))

    def total_potential(x):
        return H.potential(x) + qd(x) / H.measure(x)

    induced = InducedGraph(g, contains)
    restricted = SchrodingerOperator(induced, H.measure, LazyFunction(total_potential, contains,
                                                                      name="q+qD/m"))
    return GraphDomain(H, contains, induced, LazyFunction(qd, contains, name="qD"), restricted, win)


# --------------------------------------------------------------------------
# Ellipticity and the local Harnack ratio


@dataclass(frozen=True)
class EllipticityReport:
    ellipticity: float
    harnack_ratio: float | None
    harnack_floor: float
    worst_edge: tuple | None = None

    @property
    def harnack_holds(self) -> bool:
        return self.harnack_ratio is None or self.harnack_ratio >= self.harnack_floor


def ellipticity_and_harnack(graph: WeightedGraph, window: Iterable[Vertex],
                            u: Callable | None = None) -> EllipticityReport:
    """Uniform ellipticity constant and the Harnack ratio of ``u`` on a window.

    ``λ = max_{x ∈ window, z ~ x} deg(x)/b(x,z)``.  The Harnack ratio is
    ``min u(y)/u(x)`` over edges with both endpoints in the window; the floor
    is ``1/D`` for standard weights with a degree bound and ``1/λ`` otherwise.
    """
    win = list(window)
    members = set(win)
    lam = 0.0
    for x in win:
        nb = graph.neighbors(x)
        deg = fsum(b for _, b in nb)
        for _, b in nb:
            lam = max(lam, deg / b)
    ratio = worst = None
    if u is not None:
        for x in win:
            ux = u(x)
            for y, _ in graph.neighbors(x):
                if y in members:
                    r = u(y) / ux
                    if ratio is None or r < ratio:
                        ratio, worst = r, (x, y)
    if graph.standard_weights and graph.degree_bound:
        floor = 1.0 / graph.degree_bound
    else:
        floor = 1.0 / lam if lam > 0 else 0.0
    return EllipticityReport(lam, ratio, floor, worst)


def is_superharmonic(H: SchrodingerOperator, u: Callable, vertices: Iterable[Vertex],
                     tol: float = 0.0) -> bool:
    return all(schrodinger_apply(H, u, x) >= -tol for x in vertices)

