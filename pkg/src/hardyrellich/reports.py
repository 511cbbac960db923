"""Sweep reports shared by the Hardy and Rellich verifications.

A sweep evaluates an inequality margin on many finitely supported test
functions.  It can only falsify the inequality, never prove it, and every
serialized report says so in its ``note`` field.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from .functions import FiniteFunction, from_pairs

SWEEP_TOL = 1e-9
QUANTILES = (0.0, 0.01, 0.05, 0.5, 0.95, 1.0)
FALSIFICATION_NOTE = ("falsification attempt over sampled test functions; "
                      "a pass is evidence, not a proof of the inequality for all test functions")


def phi_to_json(phi: FiniteFunction) -> list:
    """``[[vertex, value], ...]`` in a canonical vertex order."""
    return phi.to_pairs()


def phi_from_json(pairs) -> FiniteFunction:
    return from_pairs(pairs)


def _clean(v):
    """Make floats JSON-safe (``inf``/``nan`` become strings)."""
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _norm(margin: float, scale: float) -> float:
    return margin / scale if scale > 0 else margin


@dataclass
class InequalityReport:
    """Per-sample margins of one inequality sweep.

    A sample passes when ``margin >= -tolerance * scale``; the normalized
    margin is ``margin / scale`` (or the raw margin when the scale is 0).
    """

    name: str
    kind: str
    margins: list = field(default_factory=list)
    scales: list = field(default_factory=list)
    families: list = field(default_factory=list)
    worst_phi: FiniteFunction | None = None
    worst_index: int | None = None
    tolerance: float = SWEEP_TOL
    parameters: dict = field(default_factory=dict)
    eikonal: dict | None = None
    note: str = FALSIFICATION_NOTE

    @property
    def n_samples(self) -> int:
        return len(self.margins)

    @property
    def normalized(self) -> np.ndarray:
        m = np.asarray(self.margins, dtype=float)
        s = np.asarray(self.scales, dtype=float)
        return np.divide(m, s, out=m.copy(), where=s > 0)

    @property
    def worst_normalized(self) -> float:
        return float(self.normalized.min()) if self.margins else 0.0

    @property
    def worst_margin(self) -> float:
        return self.margins[self.worst_index] if self.worst_index is not None else 0.0

    @property
    def worst_scale(self) -> float:
        return self.scales[self.worst_index] if self.worst_index is not None else 0.0

    @property
    def n_violations(self) -> int:
        return int(np.sum(self.normalized < -self.tolerance)) if self.margins else 0

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    @property
    def eikonal_passed(self) -> bool | None:
        return None if self.eikonal is None else bool(self.eikonal["pass"])

    @property
    def chain_consistent(self) -> bool | None:
        """False exactly when the pointwise eikonal check passed but a sample violated."""
        if self.eikonal is None:
            return None
        return not (self.eikonal_passed and not self.passed)

    def quantiles(self) -> dict:
        if not self.margins:
            return {}
        qs = np.quantile(self.normalized, QUANTILES)
        return {f"q{p:g}": float(v) for p, v in zip(QUANTILES, qs)}

    def add(self, margin: float, scale: float, phi: FiniteFunction, family: str = "") -> None:
        i = len(self.margins)
        self.margins.append(float(margin))
        self.scales.append(float(scale))
        self.families.append(family)
        if self.worst_index is None or _norm(margin, scale) < _norm(self.worst_margin,
                                                                      self.worst_scale):
            self.worst_index = i
            self.worst_phi = phi

    def to_dict(self) -> dict:
        fam_counts = {}
        for f in self.families:
            fam_counts[f] = fam_counts.get(f, 0) + 1
        return _clean({
            "name": self.name,
            "kind": self.kind,
            "n_samples": self.n_samples,
            "pass": self.passed,
            "n_violations": self.n_violations,
            "tolerance": self.tolerance,
            "worst_margin": self.worst_margin,
            "worst_scale": self.worst_scale,
            "worst_normalized": self.worst_normalized,
            "worst_index": self.worst_index,
            "worst_family": self.families[self.worst_index] if self.worst_index is not None else None,
            "worst_phi": phi_to_json(self.worst_phi) if self.worst_phi is not None else None,
            "quantiles": self.quantiles(),
            "families": dict(sorted(fam_counts.items())),
            "parameters": dict(sorted(self.parameters.items())),
            "eikonal": self.eikonal,
            "chain_consistent": self.chain_consistent,
            "note": self.note,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def run_sweep(name: str, kind: str, margin_fn: Callable[[FiniteFunction], tuple],
              samples: Iterable[tuple], tolerance: float = SWEEP_TOL,
              parameters: dict | None = None) -> InequalityReport:
    """Evaluate ``margin_fn(φ) -> (margin, scale)`` on ``(family, φ)`` pairs."""
    report = InequalityReport(name, kind, tolerance=tolerance, parameters=dict(parameters or {}))
    for family, phi in samples:
        margin, scale = margin_fn(phi)
        report.add(margin, scale, phi, family)
    return report
