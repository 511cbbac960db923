"""Locally finite weighted graphs given by neighbour oracles.

A graph is anything with a ``neighbors(x)`` method returning a tuple of
``(y, b(x, y))`` pairs with ``b > 0`` and ``y != x``.  The concrete classes
here cover the built-in examples (line graph on N_0, the lattice Z^d),
finite graphs read from edge lists, and the derived graphs used by the
operator constructions (induced subgraphs, ground-state transforms, and the
supergraph with an extra vertex at infinity).
"""

from __future__ import annotations

import math
import re
from collections import deque
from collections.abc import Callable, Hashable, Iterable

from .errors import DomainError

Vertex = Hashable


class WeightedGraph:
    """Base class: symmetric edge weights behind a neighbour oracle."""

    degree_bound: float | None = None
    standard_weights: bool = False

    def neighbors(self, x: Vertex) -> tuple:
        raise NotImplementedError

    def has_vertex(self, x: Vertex) -> bool:
        return True

    def weight(self, x: Vertex, y: Vertex) -> float:
        for z, b in self.neighbors(x):
            if z == y:
                return b
        return 0.0

    def degree(self, x: Vertex) -> float:
        """Weighted degree ``sum_y b(x, y)``."""
        return math.fsum(b for _, b in self.neighbors(x))

    def neighborhood(self, vertices: Iterable[Vertex]) -> set:
        """The set together with all of its neighbours."""
        out = set(vertices)
        for x in list(out):
            out.update(y for y, _ in self.neighbors(x))
        return out


class FiniteGraph(WeightedGraph):
    """A finite graph stored as an adjacency dict ``{x: {y: b}}``."""

    def __init__(self, adjacency: dict, degree_bound=None, standard_weights=False):
        self._adj = {x: dict(nb) for x, nb in adjacency.items()}
        for x, nb in self._adj.items():
            if x in nb:
                raise DomainError(f"self-loop at vertex {x!r}")
            for y, b in nb.items():
                if not b > 0:
                    raise DomainError(f"nonpositive weight {b!r} on edge ({x!r}, {y!r})")
                if self._adj.get(y, {}).get(x) != b:
                    raise DomainError(f"asymmetric weight on edge ({x!r}, {y!r})")
        self._nbrs = {x: tuple(sorted(nb.items(), key=lambda t: repr(t[0])))
                      for x, nb in self._adj.items()}
        self.degree_bound = degree_bound
        self.standard_weights = standard_weights

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable = ()) -> FiniteGraph:
        """Build from ``(x, y, b)`` triples, completing symmetry.

        If both orientations of an edge are given their weights must agree.
        """
        adj: dict = {x: {} for x in vertices}
        given: dict = {}
        for x, y, b in edges:
            b = float(b)
            if x == y:
                raise DomainError(f"self-loop at vertex {x!r}")
            if (x, y) in given and given[(x, y)] != b:
                raise DomainError(f"edge ({x!r}, {y!r}) listed twice with different weights")
            given[(x, y)] = b
            if (y, x) in given and given[(y, x)] != b:
                raise DomainError(
                    f"edge ({x!r}, {y!r}) has weight {b} but reverse has {given[(y, x)]}")
            adj.setdefault(x, {})[y] = b
            adj.setdefault(y, {})[x] = b
        return cls(adj)

    @property
    def vertices(self) -> list:
        return list(self._adj)

    def has_vertex(self, x):
        return x in self._adj

    def neighbors(self, x):
        try:
            return self._nbrs[x]
        except KeyError:
            raise DomainError(f"{x!r} is not a vertex of this graph") from None

    def weight(self, x, y):
        return self._adj.get(x, {}).get(y, 0.0)

    def edges(self):
        """Each undirected edge once, as ``(x, y, b)``."""
        seen = set()
        for x, nb in self._nbrs.items():
            for y, b in nb:
                key = frozenset((x, y))
                if key not in seen:
                    seen.add(key)
                    yield x, y, b


class LineGraph(WeightedGraph):
    """The standard line graph on N_0 = {0, 1, 2, ...}."""

    degree_bound = 2
    standard_weights = True

    def has_vertex(self, x):
        return isinstance(x, int) and x >= 0

    def neighbors(self, x):
        if not self.has_vertex(x):
            raise DomainError(f"{x!r} is not a vertex of the line graph on N_0")
        if x == 0:
            return ((1, 1.0),)
        return ((x - 1, 1.0), (x + 1, 1.0))

    def __repr__(self):
        return "LineGraph()"


class LatticeGraph(WeightedGraph):
    """The standard graph on Z^d; vertices are integer ``d``-tuples."""

    standard_weights = True

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("lattice dimension must be >= 1")
        self.dim = dim
        self.degree_bound = 2 * dim

    def has_vertex(self, x):
        return isinstance(x, tuple) and len(x) == self.dim

    def neighbors(self, x):
        if not self.has_vertex(x):
            raise DomainError(f"{x!r} is not a vertex of Z^{self.dim}")
        out = []
        for i in range(self.dim):
            for s in (-1, 1):
                y = list(x)
                y[i] += s
                out.append((tuple(y), 1.0))
        return tuple(out)

    def __repr__(self):
        return f"LatticeGraph({self.dim})"


class InducedGraph(WeightedGraph):
    """The restriction ``b_Y`` of a graph to a vertex subset ``Y``."""

    def __init__(self, parent: WeightedGraph, contains: Callable[[Vertex], bool]):
        self.parent = parent
        self.contains = contains
        self.degree_bound = parent.degree_bound
        self.standard_weights = parent.standard_weights

    def has_vertex(self, x):
        return self.contains(x)

    def neighbors(self, x):
        if not self.contains(x):
            raise DomainError(f"{x!r} is outside the induced vertex set")
        return tuple((y, b) for y, b in self.parent.neighbors(x) if self.contains(y))


class ProductWeightGraph(WeightedGraph):
    """Edge weights ``b(x, y) u(x) u(y)`` (the ground-state transform of ``b``).

    Edges where ``u`` vanishes at an endpoint are dropped.
    """

    def __init__(self, parent: WeightedGraph, u: Callable[[Vertex], float]):
        self.parent = parent
        self.u = u

    def has_vertex(self, x):
        return self.parent.has_vertex(x)

    def neighbors(self, x):
        ux = self.u(x)
        out = []
        for y, b in self.parent.neighbors(x):
            # u(x)*u(y) is commutative in IEEE arithmetic, so symmetry is bit-exact
            bb = b * (ux * self.u(y))
            if bb > 0:
                out.append((y, bb))
        return tuple(out)


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_infinity, ())


def _infinity():
    return INFINITY


INFINITY = _Infinity()


class SupergraphWithInfinity(WeightedGraph):
    """A graph on ``X ∪ {INFINITY}`` adding edges ``b(x, INFINITY) = kill(x)``.

    The extra vertex generally has infinitely many neighbours, so its own
    neighbour list is not enumerable; only functions vanishing at
    ``INFINITY`` are meant to be paired with this graph.
    """

    def __init__(self, base: WeightedGraph, kill: Callable[[Vertex], float]):
        self.base = base
        self.kill = kill

    def has_vertex(self, x):
        return x is INFINITY or self.base.has_vertex(x)

    def neighbors(self, x):
        if x is INFINITY:
            raise DomainError("the vertex at infinity has no enumerable neighbour list")
        k = self.kill(x)
        nb = self.base.neighbors(x)
        return nb + ((INFINITY, k),) if k > 0 else nb

    def weight(self, x, y):
        if x is INFINITY:
            x, y = y, x
        if y is INFINITY:
            return self.kill(x)
        return self.base.weight(x, y)


# --------------------------------------------------------------------------
# Traversal and auditing helpers


def is_connected(graph: WeightedGraph, vertices: Iterable[Vertex]) -> bool:
    """Whether the induced graph on a finite vertex set is connected."""
    vs = set(vertices)
    if not vs:
        return True
    start = next(iter(vs))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y, _ in graph.neighbors(x):
            if y in vs and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen == vs


def ball(graph: WeightedGraph, root: Vertex, radius: int,
         contains: Callable[[Vertex], bool] | None = None) -> list:
    """Combinatorial ball around ``root`` in the graph induced on ``contains``."""
    if contains is not None and not contains(root):
        raise DomainError(f"root {root!r} is outside the domain")
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for y, _ in graph.neighbors(x):
            if y not in dist and (contains is None or contains(y)):
                dist[y] = dist[x] + 1
                queue.append(y)
    return sorted(dist, key=lambda v: (dist[v], v))


def symmetry_defect(graph: WeightedGraph, vertices: Iterable[Vertex]) -> list:
    """Edges discovered from ``vertices`` whose weights are not bit-exactly symmetric."""
    bad = []
    for x in vertices:
        for y, b in graph.neighbors(x):
            if y is INFINITY:
                continue
            if graph.weight(y, x) != b:
                bad.append((x, y, b, graph.weight(y, x)))
    return bad


# --------------------------------------------------------------------------
# Edge-list files and named generators


def parse_edge_list(text: str) -> FiniteGraph:
    """Parse ``x y weight`` lines (``#`` starts a comment).

    Vertex tokens that look like integers become ``int``; anything else stays
    a string.
    """
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"line {lineno}: expected 'x y weight', got {raw!r}")
        x, y, w = parts
        try:
            weight = float(w)
        except ValueError:
            raise DomainError(f"line {lineno}: weight {w!r} is not a decimal literal") from None
        edges.append((_vertex_token(x), _vertex_token(y), weight))
    return FiniteGraph.from_edges(edges)


def _vertex_token(tok: str):
    return int(tok) if re.fullmatch(r"[+-]?\d+", tok) else tok


def load_edge_list(path) -> FiniteGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(graph: FiniteGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, b in graph.edges():
            fh.write(f"{x} {y} {b!r}\n")


def make_graph(name: str) -> WeightedGraph:
    """Built-in generators: ``line``, ``lattice:<d>``, ``quadrant:<d>``.

    ``quadrant:<d>`` returns the ambient lattice Z^d; the quadrant itself is
    the domain N^d, see :func:`hardyrellich.instances.quadrant_domain`.
    """
    if name == "line":
        return LineGraph()
    kind, _, dim = name.partition(":")
    if kind in ("lattice", "quadrant") and dim.isdigit():
        return LatticeGraph(int(dim))
    raise DomainError(f"unknown graph generator {name!r}")


def random_graph(rng, n_vertices: int, edge_prob: float = 0.3,
                 weight_range=(0.0, 10.0), connected: bool = True) -> FiniteGraph:
    """Random finite graph on ``0..n-1`` with weights uniform in ``(lo, hi]``."""
    lo, hi = weight_range
    adj = {i: {} for i in range(n_vertices)}
    order = list(rng.permutation(n_vertices)) if connected else []
    edges = set()
    for i in range(1, len(order)):
        a, b = int(order[i]), int(order[rng.integers(0, i)])
        edges.add((min(a, b), max(a, b)))
    for a in range(n_vertices):
        for b in range(a + 1, n_vertices):
            if rng.random() < edge_prob:
                edges.add((a, b))
    for a, b in sorted(edges):
        w = hi - (hi - lo) * rng.random()  # in (lo, hi]
        adj[a][b] = w
        adj[b][a] = w
    return FiniteGraph(adj)
