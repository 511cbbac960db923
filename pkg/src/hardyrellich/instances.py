"""Built-in examples: the line, the quadrant, the log-weighted line, Z^d Green weights
and the line with a non-constant measure.

Each :class:`Example` bundles an operator ``H``, a domain ``Y``, a positive
superharmonic ``u``, the Hardy weight built from it, the eikonal function
``g = θ(u^{1/2})²`` for an admissible θ, the matching constant γ and a
finite window plus sampler for sweeps.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable
from dataclasses import dataclass, field

from .eikonal import corollary_constants
from .errors import DomainError
from .graphs import LatticeGraph, LineGraph
from .hardy import (HardyWeight, hardy_sweep, line_hardy_weight, quadrant_hardy_weight,
                    supersolution_weight)
from .operators import SchrodingerOperator, restrict_to_domain
from .reports import InequalityReport
from .rellich import RellichInstance, extremal_test_function, pointwise_eikonal, rellich_sweep
from .sampling import TestFunctionSampler

Vertex = Hashable

EXAMPLES = ("line", "quadrant:<d>", "log-line", "lattice:<d>", "schrodinger-line")
DEFAULT_RADIUS = {"line": 200, "log-line": 200, "schrodinger-line": 200, "quadrant": 15,
                  "lattice": 7}
EXTREMAL_SIZE = 120


def in_naturals(x) -> bool:
    return isinstance(x, int) and x >= 1


def in_quadrant(dim: int) -> Callable[[Vertex], bool]:
    def contains(x):
        return isinstance(x, tuple) and len(x) == dim and all(c >= 1 for c in x)
    return contains


def quadrant_domain(dim: int) -> Callable[[Vertex], bool]:
    """Membership predicate of N^d inside Z^d."""
    return in_quadrant(dim)


@dataclass
class Example:
    """One fully specified Hardy/Rellich instance with its sampling window."""

    name: str
    operator: SchrodingerOperator
    domain: Callable[[Vertex], bool]
    u: Callable[[Vertex], float]
    weight: HardyWeight
    g: Callable[[Vertex], float]
    gamma: float
    window: list
    degree: float
    alpha: float | None = None
    profiles: dict = field(default_factory=dict)
    max_side: int | None = None
    notes: dict = field(default_factory=dict)

    def sampler(self) -> TestFunctionSampler:
        return TestFunctionSampler(self.window, self.profiles, max_side=self.max_side)

    def rellich_instance(self, gamma: float | None = None) -> RellichInstance:
        return RellichInstance(self.operator, self.weight, self.g,
                               self.gamma if gamma is None else gamma, self.domain, self.name)

    def graph_domain(self):
        return restrict_to_domain(self.operator, self.domain, self.window)

    def extremal(self, gamma: float | None = None, size: int = EXTREMAL_SIZE):
        """Exact Rellich minimiser over the ``size`` window vertices nearest the corner."""
        core = sorted(self.window, key=_corner_order)[:size]
        return extremal_test_function(self.rellich_instance(gamma), core)

    def hardy_sweep(self, n_samples: int, seed: int = 0) -> InequalityReport:
        return hardy_sweep(self.operator, self.weight, self.sampler(), n_samples, seed,
                           name=f"hardy:{self.name}")

    def rellich_sweep(self, n_samples: int, seed: int = 0, gamma: float | None = None,
                      adversarial: bool = True) -> InequalityReport:
        """Sampled sweep; with ``adversarial`` the exact minimiser on a core set is added."""
        inst = self.rellich_instance(gamma)
        extra = (self.extremal(gamma).phi,) if adversarial else ()
        report = rellich_sweep(inst, self.sampler(), n_samples, seed, extra=extra)
        report.parameters.update({"example": self.name, "alpha": self.alpha,
                                  "degree": self.degree})
        return report

    def eikonal_report(self, gamma: float | None = None):
        return pointwise_eikonal(self.rellich_instance(gamma), self.window)


def _corner_order(x):
    return (sum(x), x) if isinstance(x, tuple) else (x, x)


def _power_profiles(u, g) -> dict:
    return {
        "u^beta": lambda x, s: u(x) ** s,
        "u^1/2": lambda x, s: math.sqrt(u(x)),
        "g^-1/2": lambda x, s: g(x) ** -0.5,
    }


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def line_example(alpha: float = 0.5, radius: int | None = None) -> Example:
    """Line graph on N_0, Y = N, u(n) = n, g = n^α, γ at D = 2."""
    _check_alpha(alpha)
    radius = radius or DEFAULT_RADIUS["line"]
    H = SchrodingerOperator(LineGraph())
    u = float
    def g(n):
        return float(n) ** alpha
    return Example("line", H, in_naturals, u, line_hardy_weight(), g,
                   corollary_constants("power", 2, alpha=alpha), list(range(1, radius + 1)),
                   2, alpha, _power_profiles(u, g))


def log_line_example(radius: int | None = None) -> Example:
    """Line graph with θ = log(t + 1): g = log²(n^{1/2} + 1), γ for u >= 1 at D = 2."""
    radius = radius or DEFAULT_RADIUS["log-line"]
    H = SchrodingerOperator(LineGraph())
    u = float
    def g(n):
        return math.log1p(math.sqrt(n)) ** 2
    return Example("log-line", H, in_naturals, u, line_hardy_weight(), g,
                   corollary_constants("log", 2, c=1.0), list(range(1, radius + 1)),
                   2, None, _power_profiles(u, g))


def quadrant_example(dim: int = 2, alpha: float = 0.5, radius: int | None = None) -> Example:
    """Z^d with Y = N^d, u = k_1...k_d, the additive weight, g = u^α, γ at D = 2d."""
    _check_alpha(alpha)
    if dim < 1:
        raise DomainError("dimension must be >= 1")
    radius = radius or DEFAULT_RADIUS["quadrant"]
    H = SchrodingerOperator(LatticeGraph(dim))
    def u(k):
        return float(math.prod(k))
    def g(k):
        return u(k) ** alpha
    window = [k for k in _box(dim, 1, radius)]
    return Example(f"quadrant:{dim}", H, in_quadrant(dim), u, quadrant_hardy_weight(dim), g,
                   corollary_constants("power", 2 * dim, alpha=alpha), window, 2 * dim, alpha,
                   _power_profiles(u, g))


def _box(dim, lo, hi):
    if dim == 1:
        for c in range(lo, hi + 1):
            yield (c,)
        return
    for head in range(lo, hi + 1):
        for tail in _box(dim - 1, lo, hi):
            yield (head,) + tail


def schrodinger_line_example(alpha: float = 0.5, radius: int | None = None) -> Example:
    """Line graph with measure m(k) = 1 + 1/k (m(0) = 2), q = 0.

    ``u(n) = n`` stays harmonic for ``H = Δ/m``, and the supersolution weight
    is the line weight divided by ``m``; the Rellich margins coincide with
    those of the unweighted line.
    """
    _check_alpha(alpha)
    radius = radius or DEFAULT_RADIUS["schrodinger-line"]

    def m(k):
        return 1.0 + 1.0 / k if k > 0 else 2.0
    H = SchrodingerOperator(LineGraph(), measure=m)
    u = float
    def g(n):
        return float(n) ** alpha
    w = supersolution_weight(H, u, 0.5, domain=in_naturals)
    w.provenance = "supersolution(u=n, alpha=0.5, m=1+1/k)"
    return Example("schrodinger-line", H, in_naturals, u, w, g,
                   corollary_constants("power", 2, alpha=alpha), list(range(1, radius + 1)),
                   2, alpha, _power_profiles(u, g))


def lattice_example(dim: int = 3, alpha: float = 0.5, radius: int | None = None,
                    box: int = 48, steps: int = 2048, table=None) -> Example:
    """Z^d with the Green-function weight on the table's trust region, g = G^α.

    ``radius`` bounds the sup-norm of the sampling window inside the trust
    region; ``box`` and ``steps`` are the table parameters.
    """
    from .green import green_hardy_weight, green_window

    _check_alpha(alpha)
    radius = radius or DEFAULT_RADIUS["lattice"]
    table = table if table is not None else green_window(dim, box, steps)
    w = green_hardy_weight(table)
    H = SchrodingerOperator(LatticeGraph(dim))

    def u(k):
        return table(k)
    def g(k):
        return table(k) ** alpha
    window = [k for k in w.region_sites() if max(abs(c) for c in k) <= radius]
    if not window:
        raise DomainError("the trust region does not meet the sampling window")
    ex = Example(f"lattice:{dim}", H, w.in_region, u, w, g,
                 corollary_constants("power", 2 * dim, alpha=alpha), window, 2 * dim, alpha,
                 _power_profiles(u, g), max_side=6)
    ex.notes = dict(table.metadata(), flagged=len(w.flagged))
    return ex


def make_example(name: str, alpha: float = 0.5, radius: int | None = None, **kw) -> Example:
    """Look up a built-in example by its CLI name."""
    kind, _, dim = name.partition(":")
    if name == "line":
        return line_example(alpha, radius)
    if name == "log-line":
        return log_line_example(radius)
    if name == "schrodinger-line":
        return schrodinger_line_example(alpha, radius)
    if kind == "quadrant" and dim.isdigit():
        return quadrant_example(int(dim), alpha, radius)
    if kind == "lattice" and dim.isdigit():
        return lattice_example(int(dim), alpha, radius, **kw)
    raise DomainError(f"unknown example {name!r}; expected one of {', '.join(EXAMPLES)}")

