"""Real-valued functions on vertex sets.

Two concrete flavours cover everything the package needs:

* :class:`FiniteFunction` -- finitely supported, stored as a dict of the
  nonzero values.  Evaluation off the support returns exactly ``0.0``.
* :class:`LazyFunction` -- a total function given by a callable, optionally
  restricted to an evaluation *window*.  Evaluating outside the window raises
  :class:`~hardyrellich.errors.WindowError` instead of silently truncating.

Vertices are arbitrary hashables.  Lattice graphs use integer tuples; the
helpers :func:`encode_vertex` / :func:`decode_vertex` give the integer label
bijection used when vertices have to be written to flat files.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable, Mapping

from .errors import PositivityError, WindowError

Vertex = Hashable

LANE_BITS = 22
_LANE_MASK = (1 << LANE_BITS) - 1
MAX_COORD = (1 << (LANE_BITS - 1)) - 1


def _zigzag(c: int) -> int:
    return 2 * c if c >= 0 else -2 * c - 1


def _unzigzag(z: int) -> int:
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def encode_vertex(coords) -> int:
    """Pack an integer coordinate tuple into one nonnegative integer.

    Each coordinate is zigzag mapped (0, -1, 1, -2, ... -> 0, 1, 2, 3, ...)
    and stored in its own 22-bit lane, first coordinate in the lowest lane.
    Valid for ``|c| <= 2**21 - 1``.
    """
    label = 0
    for i, c in enumerate(coords):
        c = int(c)
        if abs(c) > MAX_COORD:
            raise ValueError(f"coordinate {c} outside the encodable range ±{MAX_COORD}")
        label |= _zigzag(c) << (LANE_BITS * i)
    return label


def decode_vertex(label: int, dim: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_vertex` for a known dimension."""
    if label < 0 or label >> (LANE_BITS * dim):
        raise ValueError(f"label {label} does not encode a {dim}-dimensional vertex")
    return tuple(_unzigzag((label >> (LANE_BITS * i)) & _LANE_MASK) for i in range(dim))


class FiniteFunction(Mapping):
    """A finitely supported function, stored sparsely.

    Zero values are dropped on construction, so :meth:`support` is exactly the
    set of vertices where the function is nonzero.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Mapping | Iterable | None = None):
        items = values.items() if isinstance(values, Mapping) else (values or ())
        self._values = {x: float(v) for x, v in items if v != 0}

    @classmethod
    def delta(cls, x: Vertex, value: float = 1.0) -> FiniteFunction:
        return cls({x: value})

    @classmethod
    def indicator(cls, vertices: Iterable[Vertex]) -> FiniteFunction:
        return cls({x: 1.0 for x in vertices})

    @classmethod
    def from_callable(cls, fn: Callable[[Vertex], float], vertices: Iterable[Vertex]):
        return cls({x: fn(x) for x in vertices})

    def __call__(self, x: Vertex) -> float:
        return self._values.get(x, 0.0)

    def __getitem__(self, x):
        return self._values[x]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"FiniteFunction({self._values!r})"

    def support(self) -> frozenset:
        return frozenset(self._values)

    def scale(self, c: float) -> FiniteFunction:
        return FiniteFunction({x: c * v for x, v in self._values.items()})

    def __mul__(self, other):
        """Pointwise product with a scalar or another function."""
        if isinstance(other, (int, float)):
            return self.scale(other)
        return FiniteFunction({x: v * other(x) for x, v in self._values.items()})

    __rmul__ = __mul__

    def __add__(self, other: FiniteFunction) -> FiniteFunction:
        out = dict(self._values)
        for x, v in other.items():
            out[x] = out.get(x, 0.0) + v
        return FiniteFunction(out)

    def __sub__(self, other: FiniteFunction) -> FiniteFunction:
        return self + other.scale(-1.0)

    def positive_part(self) -> FiniteFunction:
        return FiniteFunction({x: v for x, v in self._values.items() if v > 0})

    def negative_part(self) -> FiniteFunction:
        return FiniteFunction({x: -v for x, v in self._values.items() if v < 0})

    def sup_norm(self) -> float:
        return max((abs(v) for v in self._values.values()), default=0.0)

    def to_pairs(self) -> list:
        """JSON-friendly ``[[vertex, value], ...]`` sorted by vertex."""
        return [[_jsonable(x), v] for x, v in sorted(self._values.items(),
                                                      key=lambda kv: _sort_key(kv[0]))]


def _sort_key(x):
    if isinstance(x, (int, float)):
        return (0, x, "")
    if isinstance(x, tuple):
        return (1, 0, x) if all(isinstance(c, int) for c in x) else (2, 0, repr(x))
    return (3, 0, repr(x))


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def from_pairs(pairs) -> FiniteFunction:
    """Inverse of :meth:`FiniteFunction.to_pairs`."""
    return FiniteFunction({(tuple(x) if isinstance(x, list) else x): v for x, v in pairs})


class LazyFunction:
    """A total function given by a callable, with an optional evaluation window.

    Parameters
    ----------
    fn : callable
        Maps a vertex to a real number.
    window : callable or container, optional
        Either a predicate ``vertex -> bool`` or anything supporting ``in``.
        Evaluation at a vertex outside the window raises ``WindowError``.
    name : str, optional
        Used in error messages and reports.
    """

    __slots__ = ("fn", "window", "name")

    def __init__(self, fn: Callable[[Vertex], float], window=None, name: str | None = None):
        self.fn = fn
        self.window = window
        self.name = name

    def in_window(self, x: Vertex) -> bool:
        if self.window is None:
            return True
        if callable(self.window):
            return bool(self.window(x))
        return x in self.window

    def __call__(self, x: Vertex) -> float:
        if not self.in_window(x):
            raise WindowError(x, self.name)
        return self.fn(x)

    def restrict(self, window) -> LazyFunction:
        return LazyFunction(self.fn, window, self.name)

    def __repr__(self):
        return f"LazyFunction({self.name or self.fn!r})"


class Constant:
    """The constant function ``x -> value``."""

    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, x: Vertex) -> float:
        return self.value

    def __repr__(self):
        return f"Constant({self.value!r})"


ONE = Constant(1.0)
ZERO = Constant(0.0)


def power(f: Callable, alpha: float, name: str | None = None) -> LazyFunction:
    """``x -> f(x) ** alpha`` for a nonnegative function ``f``."""
    def fn(x):
        v = f(x)
        if v < 0:
            raise PositivityError("negative base in fractional power", x, v)
        return v ** alpha if v > 0 else 0.0
    window = getattr(f, "window", None)
    return LazyFunction(fn, window, name)


def check_positive(f: Callable, vertices: Iterable[Vertex], what: str = "function",
                   strict: bool = True) -> None:
    """Eagerly validate (strict) positivity of ``f`` on ``vertices``."""
    for x in vertices:
        v = f(x)
        if not math.isfinite(v) or (v <= 0 if strict else v < 0):
            raise PositivityError(f"{what} is not {'strictly ' if strict else ''}positive", x, v)
