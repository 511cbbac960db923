"""Admissible functions, their constants, and eikonal-inequality margins.

A function θ on ``[c, ∞)`` is ε-admissible with constant γ when
``|θ(t) - θ(at)| <= γ^{1/2} |1 - a| θ(t)`` for all ``t >= c``, ``a >= ε``
with ``at >= c``.  For ``θ(t) = t^α`` and ``θ(t) = log(t + 1)`` the best such
γ is the value at ``a = ε`` (or ``(a, t) = (ε, c)``) of a decreasing auxiliary
function ``ϑ``; both ``ϑ`` are evaluated here with a Taylor branch near the
removable singularity at 1.
"""

from __future__ import annotations

import math
import sys
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PositivityError
from .functions import FiniteFunction
from .operators import SchrodingerOperator

Vertex = Hashable

TAYLOR_RADIUS = 1e-6
EIKONAL_TOL = 1e-10


# --------------------------------------------------------------------------
# The auxiliary functions and the admissibility constants


def vartheta_power(t, alpha: float):
    """``((1 - t^α)/(1 - t))²`` with the value α² at ``t = 1``.  Vectorised."""
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.expm1(alpha * lt) / np.expm1(lt)) ** 2
    h = t - 1.0
    # (t^α - 1)/(t - 1) = α + α(α-1)h/2 + α(α-1)(α-2)h²/6 + O(h³)
    taylor = (alpha + alpha * (alpha - 1) * h / 2 + alpha * (alpha - 1) * (alpha - 2) * h * h / 6) ** 2
    out = np.where(np.abs(h) < TAYLOR_RADIUS, taylor, direct)
    return out[()] if out.ndim == 0 else out


def vartheta_log(a, t):
    """``((1 - log(at+1)/log(t+1))/(1 - a))²``, equal to ``t²/((t+1)² log²(t+1))`` at ``a = 1``."""
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    h = a - 1.0
    L = np.log1p(t)
    s = t / (t + 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        # log(at+1) - log(t+1) = log1p(h t/(t+1))
        direct = (np.log1p(h * s) / (h * L)) ** 2
    hs = h * s
    taylor = (s * (1.0 - hs / 2 + hs * hs / 3) / L) ** 2
    out = np.where(np.abs(h) < TAYLOR_RADIUS, taylor, direct)
    return out[()] if out.ndim == 0 else out


def _open_unit(name, v):
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {v}")


def gamma_power(alpha: float, eps: float) -> float:
    """Admissible constant ``((1 - ε^α)/(1 - ε))²`` of ``t -> t^α``."""
    _open_unit("alpha", alpha)
    _open_unit("epsilon", eps)
    return ((1.0 - eps ** alpha) / (1.0 - eps)) ** 2


def gamma_log(c: float, eps: float) -> float:
    """Admissible constant of ``t -> log(t+1)`` on ``[c, ∞)``."""
    if not c > 0:
        raise DomainError(f"floor c must be positive, got {c}")
    _open_unit("epsilon", eps)
    return (1.0 - math.log(c * eps + 1.0) / math.log(c + 1.0)) ** 2 / (1.0 - eps) ** 2


def corollary_constants(kind: str, degree: float, alpha: float | None = None,
                        c: float | None = None) -> float:
    """γ for a degree-bounded standard graph, i.e. the admissible constant at ``ε = D^{-1/2}``.

    ``kind="power"`` needs ``alpha``; ``kind="log"`` needs the lower bound ``c``
    of ``u`` (the θ floor is then ``c^{1/2}``).
    """
    if not degree >= 2:
        raise DomainError(f"degree bound must be >= 2, got {degree}")
    eps = degree ** -0.5
    if kind == "power":
        if alpha is None:
            raise DomainError("power kind needs alpha")
        return gamma_power(alpha, eps)
    if kind == "log":
        if c is None or not c > 0:
            raise DomainError("log kind needs a positive lower bound c")
        return gamma_log(math.sqrt(c), eps)
    raise DomainError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# Admissible families and grid falsification


@dataclass(frozen=True)
class AdmissibleFamily:
    """θ = t^α (``kind="power"``) or θ = log(t + 1) (``kind="log"``) on ``[floor, ∞)``."""

    kind: str
    param: float | None = None
    floor: float = 0.0

    def __post_init__(self):
        if self.kind not in ("power", "log"):
            raise DomainError(f"unknown family {self.kind!r}")
        if self.floor < 0:
            raise DomainError("floor must be >= 0")

    @classmethod
    def power(cls, alpha: float) -> AdmissibleFamily:
        _open_unit("alpha", alpha)
        return cls("power", alpha, 0.0)

    @classmethod
    def log(cls, floor: float) -> AdmissibleFamily:
        return cls("log", None, floor)

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        return t ** self.param if self.kind == "power" else np.log1p(t)

    def gamma(self, eps: float) -> float:
        if self.kind == "power":
            return gamma_power(self.param, eps)
        return gamma_log(self.floor, eps)


def default_grid(fam: AdmissibleFamily, eps: float, n_t: int = 200, n_a: int = 400):
    """Log-spaced ``t`` in ``[max(c, 1e-3), 1e3]`` and ``a`` in ``[ε, 1e2]`` (a = 1 included)."""
    t = np.geomspace(max(fam.floor, 1e-3), 1e3, n_t)
    a = np.union1d(np.geomspace(eps, 1e2, n_a), [1.0])
    return t, a


@dataclass
class AdmissibilityResult:
    worst: float
    worst_at: tuple
    gamma: float
    eps: float
    n_points: int

    def passed(self, tol: float = 1e-12) -> bool:
        return self.worst <= tol


def admissibility_check(fam: AdmissibleFamily, eps: float, gamma: float,
                        grid=None, product_floor: bool = True) -> AdmissibilityResult:
    """Largest violation of the admissibility inequality on a ``(t, a)`` grid.

    The violation ``|θ(t) - θ(at)| - γ^{1/2}|1 - a| θ(t)`` is reported relative
    to ``θ(t)``.  Grid points with ``at < c`` are skipped unless
    ``product_floor=False``; the log family's extremal point ``(t, a) = (c, ε)``
    lies in that excluded corner, so sharpness probes for it switch this off.
    """
    t, a = grid if grid is not None else default_grid(fam, eps)
    T, A = np.meshgrid(np.asarray(t, float), np.asarray(a, float), indexing="ij")
    valid = (T >= fam.floor) & (A >= eps) & (T > 0)
    if product_floor:
        valid &= A * T >= fam.floor
    th = fam.theta(T)
    with np.errstate(invalid="ignore", divide="ignore"):
        viol = (np.abs(th - fam.theta(A * T)) - math.sqrt(gamma) * np.abs(1 - A) * th) / th
    viol = np.where(valid, viol, -np.inf)
    i = np.unravel_index(np.argmax(viol), viol.shape)
    return AdmissibilityResult(float(viol[i]), (float(T[i]), float(A[i])), gamma, eps,
                               int(valid.sum()))


# --------------------------------------------------------------------------
# Eikonal margins


@dataclass
class EikonalReport:
    """Per-vertex (pointwise) or per-φ (weak) eikonal margins."""

    mode: str
    gamma: float
    margins: dict = field(default_factory=dict)
    scales: dict = field(default_factory=dict)
    tolerance: float = EIKONAL_TOL

    @property
    def normalized(self) -> dict:
        return {k: m / s if s > 0 else m for k, (m, s) in
                ((k, (self.margins[k], self.scales[k])) for k in self.margins)}

    @property
    def worst_key(self):
        norm = self.normalized
        return min(norm, key=norm.get) if norm else None

    @property
    def worst_margin(self) -> float:
        k = self.worst_key
        return self.margins[k] if k is not None else 0.0

    @property
    def worst_normalized(self) -> float:
        k = self.worst_key
        return self.normalized[k] if k is not None else 0.0

    @property
    def passed(self) -> bool:
        return self.worst_normalized >= -self.tolerance

    def to_dict(self) -> dict:
        k = self.worst_key
        return {
            "mode": self.mode,
            "gamma": self.gamma,
            "n": len(self.margins),
            "worst_margin": self.worst_margin,
            "worst_normalized": self.worst_normalized,
            "worst_at": list(k) if isinstance(k, tuple) else k,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _sqrt_checked(g: Callable) -> Callable:
    def fn(x):
        v = g(x)
        if not v > 0:
            raise PositivityError("eikonal function g is not strictly positive", x, v)
        return math.sqrt(v)
    return fn


def pointwise_eikonal_terms(H: SchrodingerOperator, g: Callable, w: Callable, gamma: float,
                            x: Vertex, domain: Callable[[Vertex], bool] | None = None):
    """``(γ g w m, |∇g^{1/2}|²)`` at ``x``; with ``domain`` only neighbours in it count."""
    sg = _sqrt_checked(g)
    sx = sg(x)
    terms = [b * (sx - sg(y)) ** 2 for y, b in H.graph.neighbors(x)
             if domain is None or domain(y)]
    lhs = 0.5 * math.fsum(terms)
    rhs = gamma * g(x) * w(x) * H.measure(x)
    return rhs, lhs


def weak_eikonal_terms(H: SchrodingerOperator, g: Callable, w: Callable, gamma: float,
                       phi: FiniteFunction):
    """``(γ ‖φ‖²_{gwm}, ½ Σ_{x,y} b φ(x)φ(y)(g^{1/2}(x) - g^{1/2}(y))²)``."""
    sg = _sqrt_checked(g)
    cross = []
    for x, v in phi.items():
        sx = sg(x)
        for y, b in H.graph.neighbors(x):
            u = phi(y)
            if u != 0:
                cross.append(0.5 * b * v * u * (sx - sg(y)) ** 2)
    norm = math.fsum(g(x) * w(x) * H.measure(x) * v * v for x, v in phi.items())
    return gamma * norm, math.fsum(cross)


def eikonal_margin(H: SchrodingerOperator, g: Callable, w: Callable, gamma: float,
                   mode: str, target, domain: Callable[[Vertex], bool] | None = None,
                   tolerance: float = EIKONAL_TOL) -> EikonalReport:
    """Eikonal margins on a vertex window (``pointwise``) or for test functions (``weak``).

    ``target`` is an iterable of vertices in pointwise mode and a
    :class:`FiniteFunction` or an iterable of them in weak mode (keys are the
    sample indices).
    """
    report = EikonalReport(mode, gamma, tolerance=tolerance)
    if mode == "pointwise":
        for x in target:
            rhs, lhs = pointwise_eikonal_terms(H, g, w, gamma, x, domain)
            report.margins[x] = rhs - lhs
            report.scales[x] = abs(rhs) + abs(lhs)
    elif mode == "weak":
        phis = [target] if isinstance(target, FiniteFunction) else list(target)
        for i, phi in enumerate(phis):
            rhs, lhs = weak_eikonal_terms(H, g, w, gamma, phi)
            report.margins[i] = rhs - lhs
            report.scales[i] = abs(rhs) + abs(lhs)
    else:
        raise DomainError(f"unknown eikonal mode {mode!r}")
    return report


def x_epsilon(graph, u: Callable, eps: float, window: Iterable[Vertex]) -> set:
    """``{x in window : min_{y ~ x} u(y)/u(x) >= ε²}``.

    ``u`` must be strictly positive on the window; neighbours may have ``u = 0``
    (they then exclude ``x``).
    """
    # a few ulps of slack so that ε = D^{-1/2} gives exactly ε² = 1/D
    e2 = eps * eps * (1 - 4 * sys.float_info.epsilon)
    out = set()
    for x in window:
        ux = u(x)
        if not ux > 0:
            raise PositivityError("u is not strictly positive on the window", x, ux)
        if all(u(y) / ux >= e2 for y, _ in graph.neighbors(x)):
            out.add(x)
    return out
