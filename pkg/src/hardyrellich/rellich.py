"""Rellich-inequality margins, sweeps and extremal test functions.

For a Hardy weight ``w`` of ``H`` on ``Y``, a positive ``g`` and ``γ ∈ (0, 1)``
the Rellich inequality reads

    ``‖1_φ Hφ‖_{(g/w)m} >= (1 - γ) ‖φ‖_{gwm}``   for φ supported in ``Y``.

The factor ``1_φ`` restricts the left norm to supp φ, so ``g`` and ``w`` are
never evaluated outside the support.  The pointwise eikonal inequality
``|∇g^{1/2}|² <= γ g w m`` (neighbours restricted to ``Y``) is sufficient for
it, and every sweep records whether that implication was respected.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .eikonal import eikonal_margin
from .errors import DomainError, PositivityError
from .functions import FiniteFunction
from .operators import SchrodingerOperator, schrodinger_apply
from .reports import InequalityReport, run_sweep
from .sampling import TestFunctionSampler, stream_id

Vertex = Hashable


@dataclass(frozen=True)
class RellichInstance:
    """The data ``(H, w, g, γ, Y)`` of one Rellich inequality.

    ``domain`` is a membership predicate for ``Y`` (``None`` means the whole
    vertex set).  ``g = w`` is the case where the left norm is unweighted.
    """

    operator: SchrodingerOperator
    weight: Callable[[Vertex], float]
    g: Callable[[Vertex], float]
    gamma: float
    domain: Callable[[Vertex], bool] | None = None
    name: str = "rellich"

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")

    def check_supported(self, phi: FiniteFunction) -> None:
        if self.domain is None:
            return
        for x in phi.support():
            if not self.domain(x):
                raise DomainError(f"test function escapes the domain at vertex {x!r}")


class RellichTerms(NamedTuple):
    lhs: float
    rhs: float
    margin: float

    @property
    def scale(self) -> float:
        return abs(self.lhs) + abs(self.rhs)


def _positive(fn, x, what):
    v = fn(x)
    if not v > 0:
        raise PositivityError(f"{what} is not strictly positive", x, v)
    return v


def rellich_margin(inst: RellichInstance, phi: FiniteFunction) -> RellichTerms:
    """``(lhs, rhs, lhs - rhs)`` for ``lhs = ‖1_φ Hφ‖_{(g/w)m}``, ``rhs = (1-γ)‖φ‖_{gwm}``."""
    inst.check_supported(phi)
    H = inst.operator
    left, right = [], []
    for x, v in phi.items():
        g = _positive(inst.g, x, "g")
        w = _positive(inst.weight, x, "Hardy weight")
        m = H.measure(x)
        h = schrodinger_apply(H, phi, x)
        left.append(g / w * m * h * h)
        right.append(g * w * m * v * v)
    lhs = math.sqrt(math.fsum(left))
    rhs = (1.0 - inst.gamma) * math.sqrt(math.fsum(right))
    return RellichTerms(lhs, rhs, lhs - rhs)


def pointwise_eikonal(inst: RellichInstance, window: Iterable[Vertex]):
    """Pointwise eikonal report of the instance on a finite window of ``Y``."""
    return eikonal_margin(inst.operator, inst.g, inst.weight, inst.gamma, "pointwise",
                          window, domain=inst.domain)


def rellich_sweep(inst: RellichInstance, sampler: TestFunctionSampler | None, n_samples: int,
                  seed: int = 0, stream: int | None = None,
                  extra: Sequence[FiniteFunction] = (), eikonal_window=None) -> InequalityReport:
    """Rellich margins for ``n_samples`` sampled test functions plus ``extra`` ones.

    The pointwise eikonal inequality is checked on ``eikonal_window`` (default:
    the sampler window); the report's ``chain_consistent`` flag is false only
    if it passed while some sample violated the Rellich margin.
    """
    stream = stream_id(inst.name) if stream is None else stream
    samples = []
    if sampler is not None and n_samples > 0:
        samples.extend((fam, phi) for _, fam, phi in sampler.samples(n_samples, seed, stream))
    samples.extend(("extra", phi) for phi in extra)

    def margin(phi):
        t = rellich_margin(inst, phi)
        return t.margin, t.scale

    report = run_sweep(inst.name, "rellich", margin, samples,
                       parameters={"gamma": inst.gamma, "seed": seed, "stream": stream})
    window = eikonal_window if eikonal_window is not None else (
        sampler.window if sampler is not None else None)
    if window is not None:
        report.eikonal = pointwise_eikonal(inst, window).to_dict()
    return report


# --------------------------------------------------------------------------
# Extremal test functions on a finite set


class ExtremalResult(NamedTuple):
    ratio: float
    phi: FiniteFunction

    def violates(self, gamma: float) -> bool:
        return self.ratio < 1.0 - gamma


def rellich_matrices(inst: RellichInstance, vertices: Sequence[Vertex]):
    """Matrices ``(A, Dl, Dr)`` with ``lhs² = φᵀAᵀDlAφ`` and ``rhs² = (1-γ)² φᵀDrφ``.

    ``A`` is ``H`` restricted to functions supported on ``vertices`` and
    evaluated there.
    """
    H = inst.operator
    vs = list(vertices)
    index = {x: i for i, x in enumerate(vs)}
    n = len(vs)
    A = np.zeros((n, n))
    for i, x in enumerate(vs):
        m = H.measure(x)
        for y, b in H.graph.neighbors(x):
            A[i, i] += b / m
            j = index.get(y)
            if j is not None:
                A[i, j] -= b / m
        A[i, i] += H.potential(x)
    g = np.array([_positive(inst.g, x, "g") for x in vs])
    w = np.array([_positive(inst.weight, x, "Hardy weight") for x in vs])
    m = np.array([H.measure(x) for x in vs])
    return A, g / w * m, g * w * m


def extremal_test_function(inst: RellichInstance, vertices: Sequence[Vertex]) -> ExtremalResult:
    """Minimiser of ``‖1_φ Hφ‖_{(g/w)m} / ‖φ‖_{gwm}`` over φ supported on ``vertices``.

    Computed as the smallest singular pair of ``Dl^{1/2} A Dr^{-1/2}`` (an SVD
    avoids squaring the condition number, which for polynomially growing
    weights is large).  The Rellich inequality holds on this support iff
    ``ratio >= 1 - γ``.
    """
    vs = list(vertices)
    for x in vs:
        if inst.domain is not None and not inst.domain(x):
            raise DomainError(f"vertex {x!r} is outside the domain")
    A, dl, dr = rellich_matrices(inst, vs)
    B = np.sqrt(dl)[:, None] * A / np.sqrt(dr)[None, :]
    _, sig, vt = scipy.linalg.svd(B)
    v = vt[-1] / np.sqrt(dr)
    v = v / np.abs(v).max()
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return ExtremalResult(float(sig[-1]),
                          FiniteFunction({x: float(c) for x, c in zip(vs, v)}))
