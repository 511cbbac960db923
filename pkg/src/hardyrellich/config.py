"""Run configuration: a flat ``key = value`` document.

Grammar: one ``key = value`` per line; ``#`` starts a comment; blank lines
are ignored; keys are case-sensitive.  Every value is validated before any
computation starts and errors carry the offending line number.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import ConfigError

SUITES = ("identities", "hardy", "eikonal", "rellich", "green", "solve", "all")


@dataclass(frozen=True)
class RunConfig:
    suite: str = "identities"
    example: str = "line"
    alpha: float = 0.5
    c: float = 1.0
    epsilon: float | None = None
    degree: float = 2.0
    gamma: float | None = None
    dim: int = 3
    radius: int = 48
    steps: int = 2048
    samples: int = 1000
    support_radius: int | None = None
    graphs: int = 500
    stages: int = 8
    f: str = "delta:5"
    seed: int = 0
    tolerance: float = 1e-9
    out: str | None = None

    def echo(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> RunConfig:
        data = self.echo()
        data.update({k: v for k, v in changes.items() if v is not None})
        return validate(data)

    def to_text(self) -> str:
        """Serialize so that ``parse_config(cfg.to_text()) == cfg``."""
        lines = []
        for k, v in self.echo().items():
            if v is not None:
                lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        return "\n".join(lines) + "\n"


def _open_unit(v):
    return 0 < v < 1


# key -> (parser, predicate, description of the constraint)
_RULES = {
    "suite": (str, lambda v: v in SUITES, f"one of {', '.join(SUITES)}"),
    "example": (str, lambda v: _valid_example(v),
                "line, log-line, schrodinger-line, quadrant:<d> or lattice:<d>"),
    "alpha": (float, _open_unit, "in (0, 1)"),
    "c": (float, lambda v: v > 0, "> 0"),
    "epsilon": (float, _open_unit, "in (0, 1)"),
    "degree": (float, lambda v: v >= 2, ">= 2"),
    "gamma": (float, _open_unit, "in (0, 1)"),
    "dim": (int, lambda v: v >= 3, ">= 3 (the lattice Green function needs transience)"),
    "radius": (int, lambda v: v >= 8, ">= 8"),
    "steps": (int, lambda v: v >= 8, ">= 8"),
    "samples": (int, lambda v: v >= 0, ">= 0"),
    "support_radius": (int, lambda v: v >= 1, ">= 1"),
    "graphs": (int, lambda v: v >= 1, ">= 1"),
    "stages": (int, lambda v: 1 <= v <= 20, "between 1 and 20"),
    "f": (str, lambda v: _valid_rhs(v), "terms '[coef*]delta:<vertex>' joined by ';'"),
    "seed": (int, lambda v: 0 <= v < 2 ** 63, "a nonnegative integer"),
    "tolerance": (float, lambda v: v > 0, "> 0"),
    "out": (str, lambda v: bool(v), "a non-empty path"),
}
assert set(_RULES) == {f.name for f in fields(RunConfig)}


def _valid_example(v: str) -> bool:
    if v in ("line", "log-line", "schrodinger-line"):
        return True
    kind, _, dim = v.partition(":")
    return kind in ("quadrant", "lattice") and dim.isdigit() and int(dim) >= 1 and (
        kind == "quadrant" or int(dim) >= 3)


def _valid_rhs(v: str) -> bool:
    try:
        parse_rhs(v)
    except ValueError:
        return False
    return True


def parse_rhs(text: str) -> dict:
    """Parse ``"delta:5"``, ``"2*delta:3;delta:1,1"`` into ``{vertex: coefficient}``."""
    out: dict = {}
    for term in text.split(";"):
        term = term.strip()
        coef = 1.0
        if "*" in term:
            c, term = term.split("*", 1)
            coef = float(c)
        kind, _, vertex = term.partition(":")
        if kind.strip() != "delta" or not vertex:
            raise ValueError(f"bad right-hand side term {term!r}")
        parts = [int(p) for p in vertex.split(",")]
        x = parts[0] if len(parts) == 1 else tuple(parts)
        out[x] = out.get(x, 0.0) + coef
    return out


def _convert(key: str, raw: str, line: int | None):
    parser, ok, desc = _RULES[key]
    try:
        if parser is int:
            value = int(raw)
        elif parser is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
        else:
            value = raw
    except ValueError:
        raise ConfigError(f"{key} = {raw!r} is not a valid {parser.__name__}", line) from None
    if not ok(value):
        raise ConfigError(f"{key} = {raw} is out of domain: must be {desc}", line)
    return value


def validate(data: dict, lines: dict | None = None) -> RunConfig:
    lines = lines or {}
    clean = {}
    for key, v in data.items():
        if key not in _RULES:
            raise ConfigError(f"unknown key {key!r}", lines.get(key))
        if v is None:
            clean[key] = None
            continue
        clean[key] = _convert(key, v if isinstance(v, str) else repr(v) if isinstance(v, float)
                              else str(v), lines.get(key))
    return RunConfig(**clean)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document; defaults fill missing keys."""
    data: dict = {}
    where: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", lineno)
        if key not in _RULES:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if not value:
            raise ConfigError(f"missing value for key {key!r}", lineno)
        if key in data:
            raise ConfigError(f"duplicate key {key!r} (first set on line {where[key]})", lineno)
        data[key] = value
        where[key] = lineno
    return validate(data, where)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
