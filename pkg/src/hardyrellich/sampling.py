"""Test-function sampler and per-sample seed derivation.

Sample ``i`` of a sweep with master seed ``s`` on stream ``k`` draws from
``numpy.random.default_rng([s, k, i])``; the seed sequence hashes the whole
triple, so any sample can be regenerated in isolation and the result does not
depend on evaluation order.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from .functions import FiniteFunction

FAMILIES = ("random", "box", "tent", "profile")


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(stream), int(index)])


def stream_id(name: str) -> int:
    """Stable integer id for a named sample stream (independent of PYTHONHASHSEED)."""
    h = 0
    for ch in name.encode():
        h = (h * 131 + ch) % (2 ** 31 - 1)
    return h


def _coords(x) -> tuple:
    return x if isinstance(x, tuple) else (x,)


class TestFunctionSampler:
    """Draw finitely supported test functions from a finite vertex window.

    The mixture has four families, chosen uniformly per sample:

    ``random``
        uniform values in ``[-1, 1]`` on a uniformly random subset of at most
        ``max_support`` window vertices;
    ``box``
        the indicator of a random coordinate box intersected with the window;
    ``tent``
        ``max(0, 1 - |x - c|_1 / r)`` for a random centre and radius;
    ``profile``
        a named positive profile (e.g. ``u^β``, ``g^{-1/2}``) times a box cutoff.

    Parameters
    ----------
    window : sequence
        Candidate vertices (ints or integer tuples), all inside the domain.
    max_support : int
        Largest support of the ``random`` family.
    max_side : int, optional
        Largest side length of sampled boxes (default: the whole window).
    profiles : dict, optional
        ``name -> callable(vertex, rng_value) -> float``.  The second argument
        is a uniform draw in ``[0, 1)`` a profile may use as a shape
        parameter (``u^β`` maps it to β).
    """

    __test__ = False  # not a pytest class

    def __init__(self, window: Sequence, profiles: dict[str, Callable] | None = None,
                 max_support: int = 30, families: Sequence[str] = FAMILIES,
                 max_side: int | None = None):
        self.window = list(window)
        if not self.window:
            raise ValueError("empty sampling window")
        self.members = set(self.window)
        self.profiles = dict(profiles or {})
        self.families = [f for f in families if f != "profile" or self.profiles]
        self.max_support = max_support
        self.max_side = max_side
        pts = np.array([_coords(x) for x in self.window])
        self.lo = pts.min(axis=0)
        self.hi = pts.max(axis=0)
        self._pts = pts

    def _box(self, rng) -> np.ndarray:
        lo = np.array([rng.integers(a, b + 1) for a, b in zip(self.lo, self.hi)])
        if self.max_side is None:
            hi = np.array([rng.integers(a, b + 1) for a, b in zip(lo, self.hi)])
        else:
            hi = np.minimum(lo + rng.integers(0, self.max_side, size=lo.size), self.hi)
        return np.all((self._pts >= lo) & (self._pts <= hi), axis=1)

    def sample(self, rng: np.random.Generator) -> tuple[str, FiniteFunction]:
        family = self.families[int(rng.integers(len(self.families)))]
        phi = getattr(self, f"_sample_{family}")(rng)
        if not phi:
            # degenerate draw (e.g. empty box): fall back to a random delta
            phi = FiniteFunction.delta(self.window[int(rng.integers(len(self.window)))])
        return family, phi

    def _sample_random(self, rng):
        size = int(rng.integers(1, min(self.max_support, len(self.window)) + 1))
        idx = rng.choice(len(self.window), size=size, replace=False)
        vals = rng.uniform(-1.0, 1.0, size=size)
        return FiniteFunction({self.window[int(i)]: float(v) for i, v in zip(idx, vals)})

    def _sample_box(self, rng):
        mask = self._box(rng)
        return FiniteFunction({self.window[i]: 1.0 for i in np.flatnonzero(mask)})

    def _sample_tent(self, rng):
        centre = self._pts[int(rng.integers(len(self.window)))]
        span = int(max(1, (self.hi - self.lo).max()))
        if self.max_side is not None:
            span = min(span, self.max_side)
        r = float(rng.integers(1, span + 1))
        dist = np.abs(self._pts - centre).sum(axis=1)
        vals = np.maximum(0.0, 1.0 - dist / r)
        return FiniteFunction({self.window[i]: float(vals[i]) for i in np.flatnonzero(vals > 0)})

    def _sample_profile(self, rng):
        names = sorted(self.profiles)
        name = names[int(rng.integers(len(names)))]
        shape = float(rng.random())
        mask = self._box(rng)
        prof = self.profiles[name]
        return FiniteFunction({self.window[i]: prof(self.window[i], shape)
                               for i in np.flatnonzero(mask)})

    def samples(self, n: int, seed: int = 0, stream: int = 0):
        """Yield ``(index, family, φ)`` for ``n`` reproducible samples."""
        for i in range(n):
            family, phi = self.sample(sample_rng(seed, stream, i))
            yield i, family, phi
