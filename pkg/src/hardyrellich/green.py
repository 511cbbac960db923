"""Green function of the simple random walk on Z^d, d >= 3, on a finite box.

``G(k) = Σ_n p_n(k, 0)`` is accumulated by iterating the transition stencil
on the box ``[-R, R]^d`` with absorbing boundary, then extended past the last
step by a tail model.  The default model is the local central limit shape

    ``p_n(k) ≈ c(k) n^{-d/2} exp(-d|k|²/(2n))``  for ``n ≡ ‖k‖₁ (mod 2)``,

with ``c(k)`` fitted per site by least squares on the final quartile of steps
(the free-space value is ``2 (d/2π)^{d/2}``).  Summing the model over the
remaining parity-matching steps is a step-2 midpoint rule for an integral
with a closed form in the regularized lower incomplete gamma function.
"""

from __future__ import annotations

import csv
import math
import struct
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .errors import DomainError
from .hardy import HardyWeight

MAGIC = b"GRN1"
HEADER = struct.Struct("<4s4xqqq")  # 32 bytes
TAIL_MODELS = ("lclt", "power", "fit", "none")
TRUST_ERROR = 5e-3
LEAKAGE_WARNING = 1e-2


@dataclass
class LatticeWindow:
    """Dense values on the box ``[-R, R]^d`` (index ``k + R`` along every axis)."""

    d: int
    R: int
    values: np.ndarray

    def __post_init__(self):
        shape = (2 * self.R + 1,) * self.d
        if self.values.shape != shape:
            raise DomainError(f"array shape {self.values.shape} does not match box {shape}")

    @classmethod
    def delta(cls, d: int, R: int) -> LatticeWindow:
        a = np.zeros((2 * R + 1,) * d)
        a[(R,) * d] = 1.0
        return cls(d, R, a)

    def index(self, k) -> tuple:
        k = tuple(k)
        if len(k) != self.d or any(abs(c) > self.R for c in k):
            raise DomainError(f"site {k!r} outside the box of radius {self.R}")
        return tuple(c + self.R for c in k)

    def __getitem__(self, k) -> float:
        return float(self.values[self.index(k)])

    @property
    def mass(self) -> float:
        return math.fsum(self.values.ravel())

    def coordinates(self) -> np.ndarray:
        """Integer coordinate arrays, shape ``(d, 2R+1, ..., 2R+1)``."""
        return np.indices(self.values.shape) - self.R


def _stencil(a: np.ndarray, out: np.ndarray) -> np.ndarray:
    """``out(k) = (1/2d) Σ_e a(k + e)`` with zeros outside the box."""
    d = a.ndim
    out[...] = 0.0
    hi = [slice(None)] * d
    lo = [slice(None)] * d
    for ax in range(d):
        hi[ax], lo[ax] = slice(1, None), slice(None, -1)
        out[tuple(hi)] += a[tuple(lo)]
        out[tuple(lo)] += a[tuple(hi)]
        hi[ax] = lo[ax] = slice(None)
    out *= 1.0 / (2 * d)
    return out


def transition_step(state: LatticeWindow) -> LatticeWindow:
    """One step of the walk; mass leaving the box is absorbed (lost)."""
    return LatticeWindow(state.d, state.R, _stencil(state.values, np.empty_like(state.values)))


def lclt_constant(d: int) -> float:
    """Free-space prefactor ``2 (d/2π)^{d/2}`` of the parity-matching return probability."""
    return 2.0 * (d / (2.0 * math.pi)) ** (d / 2)


def _shape_tail(d: int, r2: np.ndarray, start: np.ndarray) -> np.ndarray:
    """``Σ_{n = start, start+2, ...} n^{-d/2} exp(-d r²/(2n))`` by the step-2 midpoint rule.

    Each term is replaced by half the integral over ``[n - 1, n + 1]``; with
    ``a = d r²/2`` the integral from ``X`` to ∞ is ``a^{1-d/2} Γ(s) P(s, a/X)``,
    ``s = d/2 - 1``.
    """
    s = d / 2 - 1
    X = start - 1.0
    a = d * r2 / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        integral = np.where(a > 0, a ** (-s) * gamma_fn(s) * gammainc(s, a / X), X ** (-s) / s)
    return 0.5 * integral


@dataclass
class GreenTable:
    """Green function values on a box plus the metadata of their computation."""

    d: int
    R: int
    n_steps: int
    tail_model: str
    values: np.ndarray
    partial: np.ndarray | None = None
    tail: np.ndarray | None = None
    error: np.ndarray | None = None
    leakage: np.ndarray | None = None
    fit_constant: np.ndarray | None = None

    @property
    def window(self) -> LatticeWindow:
        return LatticeWindow(self.d, self.R, self.values)

    @property
    def total_leakage(self) -> float:
        return float(self.leakage[-1]) if self.leakage is not None and len(self.leakage) else 0.0

    @property
    def leakage_warning(self) -> bool:
        return self.total_leakage > LEAKAGE_WARNING

    def __call__(self, k) -> float:
        return self.window[k]

    def sup_distance(self) -> np.ndarray:
        """Sup-norm distance of each site to the outside of the box."""
        coords = self.window.coordinates()
        return self.R + 1 - np.abs(coords).max(axis=0)

    def trust_mask(self) -> np.ndarray:
        """Sites at sup-distance >= R/3 from the boundary with estimated error < 0.5%."""
        mask = self.sup_distance() >= self.R / 3
        if self.error is not None:
            mask &= self.error < TRUST_ERROR
        return mask & (self.values > 0)

    def metadata(self) -> dict:
        trust = self.trust_mask()
        err = self.error[trust] if self.error is not None and trust.any() else np.zeros(1)
        return {
            "d": self.d, "R": self.R, "n_steps": self.n_steps, "tail_model": self.tail_model,
            "total_leakage": self.total_leakage, "leakage_warning": self.leakage_warning,
            "trust_sites": int(trust.sum()), "max_trust_error": float(err.max()),
            "G0": float(self.values[(self.R,) * self.d]),
        }


def green_window(d: int, R: int, n_steps: int, tail_model: str = "lclt") -> GreenTable:
    """Compute ``G = Σ_{n<=N} p_n(·, 0) + tail`` on the box of radius ``R``.

    Parameters
    ----------
    d : int
        Dimension, at least 3 (the walk is recurrent below).
    R : int
        Box radius, at least 8.
    n_steps : int
        Last step ``N`` summed explicitly.
    tail_model : {"lclt", "power", "fit", "none"}
        ``lclt`` fits ``c(k)`` in the local CLT shape; ``power`` fits ``c(k)``
        with the pure power ``n^{-d/2}``; ``fit`` also fits the exponent per
        site (log-log regression); ``none`` keeps the partial sum.

    Notes
    -----
    The error estimate per site is the relative change of the tail when it
    is refitted on the final eighth instead of the final quartile, plus the
    tail weight of the deviation of ``c(k)`` from its free-space value
    (boundary absorption shows up as such a deviation).
    """
    if d < 3:
        raise DomainError(f"the Green function of Z^{d} diverges (recurrent walk); need d >= 3")
    if R < 8:
        raise DomainError(f"box radius must be >= 8, got {R}")
    if n_steps < 8:
        raise DomainError(f"need at least 8 steps, got {n_steps}")
    if tail_model not in TAIL_MODELS:
        raise DomainError(f"unknown tail model {tail_model!r}")

    state = LatticeWindow.delta(d, R)
    coords = state.coordinates()
    r2 = (coords ** 2).sum(axis=0).astype(float)
    parity = np.abs(coords).sum(axis=0) % 2
    span = {"quartile": n_steps - n_steps // 4, "eighth": n_steps - n_steps // 8}
    acc = {k: (np.zeros_like(r2), np.zeros_like(r2)) for k in span}
    # sums for the log-log regression: S1, Sx, Sxx, Sy, Sxy over matching steps
    logfit = [np.zeros_like(r2) for _ in range(5)] if tail_model == "fit" else None

    partial = np.zeros_like(r2)
    leakage = np.zeros(n_steps + 1)
    a, b = state.values, np.empty_like(state.values)
    for n in range(n_steps + 1):
        partial += a
        if n >= span["quartile"] and n > 0:
            match = parity == n % 2
            if tail_model == "lclt":
                shape = n ** (-d / 2) * np.exp(-d * r2 / (2 * n))
            else:
                shape = np.full_like(r2, float(n) ** (-d / 2))
            shape = np.where(match, shape, 0.0)
            for key, first in span.items():
                if n >= first:
                    ps, ss = acc[key]
                    ps += a * shape
                    ss += shape * shape
            if logfit is not None:
                x = math.log(n)
                with np.errstate(divide="ignore"):
                    y = np.where(match & (a > 0), np.log(np.where(a > 0, a, 1.0)), 0.0)
                use = (match & (a > 0)).astype(float)
                for arr, val in zip(logfit, (use, use * x, use * x * x, y, y * x)):
                    arr += val
        if n == n_steps:
            break
        a, b = _stencil(a, b), a
        leakage[n + 1] = 1.0 - float(a.sum())

    start = np.where(parity == (n_steps + 1) % 2, n_steps + 1, n_steps + 2).astype(float)
    fit_c = None
    tails = {}
    if tail_model in ("lclt", "power"):
        if tail_model == "lclt":
            shape_tail = _shape_tail(d, r2, start)
        else:
            shape_tail = _shape_tail(d, np.zeros_like(r2), start)
        for key, (ps, ss) in acc.items():
            with np.errstate(invalid="ignore", divide="ignore"):
                c = np.where(ss > 0, ps / ss, 0.0)
            tails[key] = c * shape_tail
            if key == "quartile":
                fit_c = c
        tail = tails["quartile"]
        with np.errstate(invalid="ignore", divide="ignore"):
            fit_err = np.abs(tails["quartile"] - tails["eighth"]) / (partial + tail)
            bias = np.abs(fit_c - lclt_constant(d)) * shape_tail / (partial + tail)
        error = fit_err + bias
    elif tail_model == "fit":
        S1, Sx, Sxx, Sy, Sxy = logfit
        with np.errstate(invalid="ignore", divide="ignore"):
            den = S1 * Sxx - Sx * Sx
            slope = np.where(den > 0, (S1 * Sxy - Sx * Sy) / den, -d / 2)
            icpt = np.where(S1 > 0, (Sy - slope * Sx) / S1, -np.inf)
        beta = np.minimum(slope, -1.0 - 1e-3)  # keep the fitted tail summable
        X = start - 1.0
        tail = 0.5 * np.exp(icpt) * X ** (beta + 1) / (-(beta + 1))
        fit_c = np.exp(icpt)
        with np.errstate(invalid="ignore", divide="ignore"):
            error = np.abs(beta + d / 2) * tail / (partial + tail)
    else:
        tail = np.zeros_like(r2)
        # without a model the whole missing tail is the error: bound it by the free-space shape
        with np.errstate(invalid="ignore", divide="ignore"):
            error = lclt_constant(d) * _shape_tail(d, r2, start) / np.where(partial > 0, partial, np.inf)
    error = np.where(np.isfinite(error), error, np.inf)
    return GreenTable(d, R, n_steps, tail_model, partial + tail, partial, tail, error, leakage,
                      fit_c)


# --------------------------------------------------------------------------
# Checks on a table


def symmetry_defect(values: np.ndarray) -> float:
    """Largest relative deviation of a box array from its axis permutations and flips."""
    ref = np.abs(values).max()
    if ref == 0:
        return 0.0
    worst = 0.0
    d = values.ndim
    for ax in range(d):
        worst = max(worst, float(np.abs(values - np.flip(values, ax)).max()))
    for ax in range(1, d):
        worst = max(worst, float(np.abs(values - np.swapaxes(values, 0, ax)).max()))
    return worst / ref


def axis_profile(table: GreenTable, kmin: int = 1, kmax: int | None = None):
    """``(|k|, G(k))`` along the first positive axis."""
    kmax = table.R if kmax is None else kmax
    ks = np.arange(kmin, kmax + 1)
    idx = [np.full_like(ks, table.R) for _ in range(table.d)]
    idx[0] = ks + table.R
    return ks, table.values[tuple(idx)]


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --------------------------------------------------------------------------
# The induced Hardy weight


class GreenHardyWeight(HardyWeight):
    """``w = Δ G^{1/2} / G^{1/2}`` from a table, valid on its (shrunk) trust region.

    Attributes
    ----------
    array : ndarray
        ``w`` on the box (``nan`` on the outer layer, where Δ needs sites
        outside the box).
    region : ndarray of bool
        Trust region with every site where ``w <= 0`` removed.
    flagged : list of tuple
        Trust-region sites removed because ``w <= 0`` there.
    """

    def __init__(self, table: GreenTable):
        self.table = table
        sq = np.sqrt(np.maximum(table.values, 0.0))
        lap = 2 * table.d * sq - 2 * table.d * _stencil(sq, np.empty_like(sq))
        inner = np.zeros(sq.shape, dtype=bool)
        inner[(slice(1, -1),) * table.d] = True
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(inner & (sq > 0), lap / sq, np.nan)
        self.array = w
        trust = table.trust_mask() & inner
        bad = trust & ~(w > 0)
        self.region = trust & ~bad
        self.flagged = [tuple(int(c) - table.R for c in idx) for idx in np.argwhere(bad)]
        super().__init__(self._value, f"green(d={table.d}, R={table.R}, N={table.n_steps})",
                         self.in_region)

    def _index(self, k):
        return tuple(int(c) + self.table.R for c in k)

    def in_region(self, k) -> bool:
        if not isinstance(k, tuple) or len(k) != self.table.d:
            return False
        if any(abs(c) > self.table.R for c in k):
            return False
        return bool(self.region[self._index(k)])

    def _value(self, k) -> float:
        return float(self.array[self._index(k)])

    def sqrt_green(self, k) -> float:
        """``G^{1/2}`` at a box site (the ground state of the weight)."""
        return math.sqrt(self.table(k))

    def region_sites(self) -> list:
        return [tuple(int(c) - self.table.R for c in idx) for idx in np.argwhere(self.region)]


def green_hardy_weight(table: GreenTable) -> GreenHardyWeight:
    """The Hardy weight ``Δ G^{1/2}/G^{1/2}`` on the table's trust region."""
    return GreenHardyWeight(table)


# --------------------------------------------------------------------------
# Binary and CSV I/O


def write_green_binary(table: GreenTable, path) -> None:
    """32-byte header (``GRN1``, pad, d, R, N as int64 LE) then float64 LE row-major values."""
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, table.d, table.R, table.n_steps))
        fh.write(np.ascontiguousarray(table.values, dtype="<f8").tobytes())


def read_green_binary(path) -> GreenTable:
    """Inverse of :func:`write_green_binary`; only values and the header survive."""
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
        if len(head) != HEADER.size:
            raise DomainError("truncated Green table header")
        magic, d, R, N = HEADER.unpack(head)
        if magic != MAGIC:
            raise DomainError(f"bad magic {magic!r}, expected {MAGIC!r}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    shape = (2 * R + 1,) * d
    if data.size != math.prod(shape):
        raise DomainError(f"payload has {data.size} values, header implies {math.prod(shape)}")
    return GreenTable(d, R, N, "unknown", data.reshape(shape).astype(float))


def iter_sites(table: GreenTable) -> Iterator[tuple]:
    for idx in np.ndindex(table.values.shape):
        yield tuple(c - table.R for c in idx), float(table.values[idx])


def export_green_csv(table: GreenTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow([f"k{i + 1}" for i in range(table.d)] + ["G"])
        for k, v in iter_sites(table):
            out.writerow(list(k) + [repr(v)])
