"""Hardy weights and Hardy-inequality margins.

A Hardy weight ``w`` for ``H`` on ``Y`` satisfies
``Σ |∇φ|² + Σ m q φ² >= Σ w m φ²`` for every φ supported in ``Y``.  The
supersolution construction turns a positive superharmonic ``u`` into the
weight ``H(u^α)/u^α``; the closed forms for the line graph and the quadrant
are provided alongside so they can be cross-checked against it.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Hashable, Iterable
from typing import NamedTuple

from .errors import DomainError, PositivityError
from .functions import FiniteFunction
from .operators import (SchrodingerOperator, energy_form, grad_norm_sq, schrodinger_apply,
                        weighted_norm_sq)
from .reports import InequalityReport, run_sweep
from .sampling import stream_id

Vertex = Hashable

EXACT_BINOMIAL_TERMS = 25


class HardyWeight:
    """A strictly positive weight with a provenance tag.

    Parameters
    ----------
    fn : callable
        Vertex -> weight value.
    provenance : str
        ``"supersolution(u, alpha)"``, a closed-form name, or ``"user"``.
    domain : callable, optional
        Predicate for the set on which the weight is meant to be used.
    lower_bound : callable, optional
        A known pointwise lower bound, exported next to the weight.
    """

    def __init__(self, fn: Callable[[Vertex], float], provenance: str = "user",
                 domain: Callable[[Vertex], bool] | None = None,
                 lower_bound: Callable[[Vertex], float] | None = None):
        self.fn = fn
        self.provenance = provenance
        self.domain = domain
        self.lower_bound = lower_bound

    def __call__(self, x: Vertex) -> float:
        if self.domain is not None and not self.domain(x):
            raise DomainError(f"Hardy weight '{self.provenance}' queried outside its domain at {x!r}")
        w = self.fn(x)
        if not w > 0:
            raise PositivityError(f"Hardy weight '{self.provenance}' is not strictly positive", x, w)
        return w

    def __repr__(self):
        return f"HardyWeight({self.provenance})"

    def times(self, other: Callable, provenance: str | None = None) -> HardyWeight:
        """Pointwise product with another positive function (e.g. a measure)."""
        return HardyWeight(lambda x: self(x) * other(x), provenance or f"{self.provenance}*m",
                           self.domain)


# --------------------------------------------------------------------------
# Supersolution construction


def _pow(u: Callable, alpha: float) -> Callable:
    def fn(x):
        v = u(x)
        if v < 0:
            raise PositivityError("supersolution function is negative", x, v)
        return v ** alpha if v > 0 else 0.0
    return fn


def supersolution_weight(H: SchrodingerOperator, u: Callable, alpha: float = 0.5,
                         window: Iterable[Vertex] | None = None, validate: bool = True,
                         domain: Callable[[Vertex], bool] | None = None) -> HardyWeight:
    """The weight ``w = H(u^α)/u^α`` from a positive superharmonic ``u``.

    ``u`` must be strictly positive where the weight is evaluated; it may
    vanish at neighbouring vertices (a Dirichlet set).  With ``validate`` on,
    every evaluation also checks ``Hu(x) >= 0``.  If a finite ``window`` is
    given, the weight is evaluated there eagerly so a non-positive value is
    reported at construction.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")

    def fn(x):
        ux = u(x)
        if not ux > 0:
            raise PositivityError("supersolution function is not strictly positive", x, ux)
        nb = H.graph.neighbors(x)
        uy = [(u(y), b) for y, b in nb]
        if validate:
            hu = math.fsum(b * (ux - v) for v, b in uy) / H.measure(x) + H.potential(x) * ux
            if hu < -1e-12 * max(1.0, abs(ux) * H.graph.degree(x)):
                raise PositivityError("u is not superharmonic", x, hu)
        # 1 - (u(y)/u(x))^α per edge, without cancellation when u(y) ≈ u(x)
        terms = []
        for v, b in uy:
            if v < 0:
                raise PositivityError("supersolution function is negative", x, v)
            terms.append(b * -math.expm1(alpha * math.log1p((v - ux) / ux)) if v > 0 else b)
        return math.fsum(terms) / H.measure(x) + H.potential(x)

    w = HardyWeight(fn, f"supersolution(alpha={alpha})", domain)
    if window is not None:
        for x in window:
            w(x)
    return w


def supersolution_split(H: SchrodingerOperator, u: Callable, x: Vertex) -> float:
    """The α = 1/2 weight in the split form ``Hu/(2u) + q/2 + |∇u^{1/2}|²/(m u)``."""
    ux = u(x)
    sq = _pow(u, 0.5)
    return (schrodinger_apply(H, u, x) / (2 * ux) + 0.5 * H.potential(x)
            + grad_norm_sq(H.graph, sq, x) / (H.measure(x) * ux))


# --------------------------------------------------------------------------
# Margins


class HardyTerms(NamedTuple):
    energy: float
    weighted: float

    @property
    def margin(self) -> float:
        return self.energy - self.weighted

    @property
    def scale(self) -> float:
        return abs(self.energy) + abs(self.weighted)


def hardy_terms(H: SchrodingerOperator, w: Callable, phi: FiniteFunction) -> HardyTerms:
    for x in phi.support():
        dom = getattr(w, "domain", None)
        if dom is not None and not dom(x):
            raise DomainError(f"test function supported outside the weight's domain at {x!r}")
    weighted = weighted_norm_sq(phi, lambda x: w(x) * H.measure(x))
    return HardyTerms(energy_form(H, phi), weighted)


def hardy_margin(H: SchrodingerOperator, w: Callable, phi: FiniteFunction) -> float:
    """``Σ(|∇φ|² + m q φ²) - ‖φ‖²_{wm}``; the Hardy inequality holds iff this is >= 0."""
    return hardy_terms(H, w, phi).margin


def hardy_sweep(H: SchrodingerOperator, w: Callable, sampler, n_samples: int, seed: int = 0,
                stream: int | None = None, name: str = "hardy",
                extra: Iterable[FiniteFunction] = ()) -> InequalityReport:
    """Hardy margins for sampled test functions (see :class:`~.sampling.TestFunctionSampler`)."""
    stream = stream_id(name) if stream is None else stream
    samples = [(fam, phi) for _, fam, phi in sampler.samples(n_samples, seed, stream)]
    samples.extend(("extra", phi) for phi in extra)

    def margin(phi):
        t = hardy_terms(H, w, phi)
        return t.margin, t.scale

    return run_sweep(name, "hardy", margin, samples,
                     parameters={"seed": seed, "stream": stream,
                                 "weight": getattr(w, "provenance", "user")})


# --------------------------------------------------------------------------
# Closed-form weights


def line_weight(k: int, mode: str = "closed", n_terms: int = 20) -> float:
    """Optimal Hardy weight of the line graph on N_0 at ``k >= 1``.

    ``closed`` evaluates ``2 - (1+1/k)^{1/2} - (1-1/k)^{1/2}`` in the
    cancellation-free form ``2x²/((a+b)(1+a)(1+b))`` with ``x = 1/k``,
    ``a = (1+x)^{1/2}``, ``b = (1-x)^{1/2}``.  ``series`` sums the first
    ``n_terms`` terms of the power series in ``1/k²`` (needs ``k >= 2``).
    """
    if k < 1 or int(k) != k:
        raise DomainError(f"line weight needs an integer k >= 1, got {k!r}")
    if mode == "closed":
        if k == 1:
            return 2.0 - math.sqrt(2.0)
        x = 1.0 / k
        a, b = math.sqrt(1.0 + x), math.sqrt(1.0 - x)
        return 2.0 * x * x / ((a + b) * (1.0 + a) * (1.0 + b))
    if mode == "series":
        if k < 2:
            raise DomainError("the series representation needs k >= 2")
        return math.fsum(_series_coefficient(l) * float(k) ** (-2 * l)
                         for l in range(n_terms, 0, -1))
    raise DomainError(f"unknown mode {mode!r}")


def _series_coefficient(l: int) -> float:
    """``C(4l, 2l) / ((4l-1) 2^{4l-1})``."""
    if l <= EXACT_BINOMIAL_TERMS:
        return math.comb(4 * l, 2 * l) / ((4 * l - 1) * 2.0 ** (4 * l - 1))
    logc = math.lgamma(4 * l + 1) - 2 * math.lgamma(2 * l + 1)
    return math.exp(logc - (4 * l - 1) * math.log(2.0)) / (4 * l - 1)


def line_weight_lower_bound(k: int) -> float:
    return 1.0 / (4.0 * k * k)


def quadrant_weight(k: tuple) -> float:
    """``w(k_1) + ... + w(k_d)`` on N^d."""
    if any(c < 1 for c in k):
        raise DomainError(f"quadrant weight needs all coordinates >= 1, got {k!r}")
    return math.fsum(line_weight(c) for c in k)


def quadrant_lower_bound(k: tuple) -> float:
    return 0.25 * math.fsum(1.0 / (c * c) for c in k)


def line_hardy_weight() -> HardyWeight:
    return HardyWeight(line_weight, "line", lambda x: isinstance(x, int) and x >= 1,
                       line_weight_lower_bound)


def quadrant_hardy_weight(dim: int) -> HardyWeight:
    return HardyWeight(quadrant_weight, f"quadrant:{dim}",
                       lambda x: len(x) == dim and all(c >= 1 for c in x),
                       quadrant_lower_bound)


def export_weight_csv(w: HardyWeight, vertices: Iterable[Vertex], path) -> None:
    """Write ``vertex, w, lower_bound`` rows (tuples joined with spaces)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["vertex", "w", "lower_bound"])
        for x in vertices:
            lb = w.lower_bound(x) if w.lower_bound is not None else ""
            label = " ".join(map(str, x)) if isinstance(x, tuple) else x
            out.writerow([label, repr(w(x)), repr(lb) if lb != "" else ""])
