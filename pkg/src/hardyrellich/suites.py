"""Verification suites and the deterministic suite report.

A suite is a list of named checks.  Each check records a pass flag, its
worst (normalized) margin with the matching scale, and details.  The JSON
report is a pure function of the configuration and the package version;
wall-clock timings are kept out of it and written to a sidecar file.
"""

from __future__ import annotations

import json
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import RunConfig, parse_rhs
from .eikonal import (AdmissibleFamily, admissibility_check, eikonal_margin,
                      gamma_log, gamma_power, vartheta_log, vartheta_power)
from .functions import FiniteFunction
from .graphs import random_graph
from .hardy import line_weight, quadrant_weight, supersolution_weight
from .instances import in_naturals, line_example, make_example
from .operators import (SchrodingerOperator, greens_formula_residual, ground_state_residual,
                        ground_state_transform, main_identity_residual, restrict_to_domain,
                        schrodinger_apply)
from .poisson import Exhaustion, bound_report, exhaustion_solve
from .rellich import RellichInstance, extremal_test_function, rellich_sweep
from .sampling import sample_rng, stream_id

SCHEMA = 1
IDENTITY_TOL = 1e-10
ALPHAS = tuple(round(0.1 * i, 1) for i in range(1, 10))
LOG_FLOORS = (0.5, 1.0, 4.0)
BROKEN_GAMMA = 0.05
BROKEN_EXPONENT = 0.99


@dataclass
class Check:
    name: str
    passed: bool
    worst_margin: float
    scale: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed),
                "worst_margin": _num(self.worst_margin), "scale": _num(self.scale),
                "details": _jsonable(self.details)}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return v


class Context:
    """Shared expensive objects (the Green table) within one suite run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._table = None

    def table(self):
        if self._table is None:
            from .green import green_window
            self._table = green_window(self.cfg.dim, self.cfg.radius, self.cfg.steps)
        return self._table


def _residual_check(name: str, residuals: list, tol: float) -> Check:
    """``residuals`` holds ``(residual, scale)``; pass iff every residual <= tol·max(scale, 1)."""
    rel = [r / max(s, 1.0) for r, s in residuals]
    i = int(np.argmax(rel)) if rel else 0
    worst_r, worst_s = residuals[i] if residuals else (0.0, 0.0)
    return Check(name, all(v <= tol for v in rel), -max(rel, default=0.0), worst_s,
                 {"n": len(residuals), "max_residual": worst_r, "tolerance": tol})


def _sweep_check(name: str, report) -> Check:
    d = report.to_dict()
    details = {k: d[k] for k in ("n_samples", "n_violations", "worst_family", "quantiles",
                                 "chain_consistent", "note")}
    details["parameters"] = d["parameters"]
    if d["eikonal"] is not None:
        details["eikonal_pass"] = d["eikonal"]["pass"]
        details["eikonal_worst_normalized"] = d["eikonal"]["worst_normalized"]
    return Check(name, report.passed, report.worst_normalized, report.worst_scale, details)


# --------------------------------------------------------------------------
# identities


def _random_instance(rng, max_vertices: int = 30):
    n = int(rng.integers(2, max_vertices + 1))
    graph = random_graph(rng, n, edge_prob=float(rng.uniform(0.1, 0.6)))
    m = {x: float(rng.uniform(0.5, 2.0)) for x in graph.vertices}
    q = {x: float(rng.uniform(-1.0, 1.0)) for x in graph.vertices}
    H = SchrodingerOperator(graph, m.__getitem__, q.__getitem__)
    size = int(rng.integers(1, n + 1))
    supp = rng.choice(n, size=size, replace=False)
    phi = FiniteFunction({int(x): float(rng.normal()) for x in supp})
    fvals = {x: float(rng.normal()) for x in graph.vertices}
    return H, phi, fvals.__getitem__


def suite_identities(ctx: Context) -> list:
    cfg = ctx.cfg
    stream = stream_id("identities")
    green, main, gst, restr = [], [], [], []
    for i in range(cfg.graphs):
        rng = sample_rng(cfg.seed, stream, i)
        H, phi, f = _random_instance(rng)
        green.append(tuple(greens_formula_residual(H, phi, f)))
        main.append(tuple(main_identity_residual(H.graph, phi, f)))
        u = {x: float(rng.uniform(0.2, 3.0)) for x in H.graph.vertices}
        gst.append(tuple(ground_state_residual(H, ground_state_transform(H, u.__getitem__), phi)))
        verts = list(H.graph.vertices)
        Y = set(verts[: max(1, len(verts) // 2)]) | set(phi.support())
        dom = restrict_to_domain(H, Y)
        diffs = [abs(schrodinger_apply(dom.restricted, phi, x) - schrodinger_apply(H, phi, x))
                 for x in Y]
        scale = sum(abs(schrodinger_apply(H, phi, x)) for x in Y)
        restr.append((max(diffs), scale))
    return [_residual_check("identities.greens_formula", green, IDENTITY_TOL),
            _residual_check("identities.main_identity", main, IDENTITY_TOL),
            _residual_check("identities.ground_state", gst, IDENTITY_TOL),
            _residual_check("identities.restriction", restr, 1e-13)]


# --------------------------------------------------------------------------
# hardy


def suite_hardy(ctx: Context) -> list:
    cfg = ctx.cfg
    checks = []
    for name in ("line", "quadrant:2", "quadrant:3"):
        ex = make_example(name, cfg.alpha, cfg.support_radius if name == "line" else None)
        checks.append(_sweep_check(f"hardy.{name}", ex.hardy_sweep(cfg.samples, cfg.seed)))
    ex = make_example(f"lattice:{cfg.dim}", cfg.alpha, table=ctx.table())
    checks.append(_sweep_check(f"hardy.lattice:{cfg.dim}", ex.hardy_sweep(cfg.samples, cfg.seed)))

    # closed forms against the supersolution construction and the series
    line = line_example()
    rel, series = [], []
    w_line = supersolution_weight(line.operator, line.u, 0.5)
    for k in range(1, 201):
        a = line_weight(k)
        rel.append(abs(a - w_line(k)) / a)
        if 2 <= k <= 100:
            series.append(abs(a - line_weight(k, "series", 20)))
    for dim in (2, 3):
        q = make_example(f"quadrant:{dim}")
        wq = supersolution_weight(q.operator, q.u, 0.5)
        rng = sample_rng(cfg.seed, stream_id(f"quadrant-window:{dim}"), 0)
        for _ in range(100):
            k = tuple(int(c) for c in rng.integers(1, 30, size=dim))
            a = quadrant_weight(k)
            rel.append(abs(a - wq(k)) / a)
    ok = max(rel) <= 1e-12 and max(series) <= 1e-12
    checks.append(Check("hardy.closed_forms", ok, -max(max(rel), max(series)), 1.0,
                        {"n": len(rel) + len(series), "max_relative_supersolution": max(rel),
                         "max_series_error": max(series), "w1": line_weight(1)}))
    return checks


# --------------------------------------------------------------------------
# eikonal


def _default_eps(cfg: RunConfig) -> float:
    return cfg.epsilon if cfg.epsilon is not None else cfg.degree ** -0.5


def suite_eikonal(ctx: Context) -> list:
    cfg = ctx.cfg
    eps = _default_eps(cfg)
    checks = []
    power, log, sharp = [], [], []
    for a in ALPHAS:
        fam = AdmissibleFamily.power(a)
        g = gamma_power(a, eps)
        power.append(admissibility_check(fam, eps, g).worst)
        sharp.append(admissibility_check(fam, eps, 0.9 * g).worst)
    for c in LOG_FLOORS:
        fam = AdmissibleFamily.log(c)
        g = gamma_log(c, eps)
        log.append(admissibility_check(fam, eps, g).worst)
        sharp.append(admissibility_check(fam, eps, 0.9 * g, product_floor=False).worst)
    checks.append(Check("eikonal.admissibility_power", max(power) <= 1e-12, -max(power), 1.0,
                        {"alphas": list(ALPHAS), "epsilon": eps}))
    checks.append(Check("eikonal.admissibility_log", max(log) <= 1e-12, -max(log), 1.0,
                        {"floors": list(LOG_FLOORS), "epsilon": eps}))
    checks.append(Check("eikonal.sharpness_probe", min(sharp) > 1e-12, min(sharp), 1.0,
                        {"factor": 0.9, "min_violation": min(sharp)}))

    t = np.geomspace(1e-4, 1e4, 10_000)
    bad = 0
    for a in ALPHAS:
        bad += int(np.sum(np.diff(vartheta_power(t, a)) >= 0))
    aa = np.geomspace(1e-3, 1e3, 10_000)
    tt = np.geomspace(1e-2, 1e3, 10_000)
    for tv in (1e-2, 1.0, 1e3):
        bad += int(np.sum(np.diff(vartheta_log(aa, tv)) >= 0))
    for av in (1e-3, 0.5, 2.0, 1e3):
        bad += int(np.sum(np.diff(vartheta_log(av, tt)) > 0))
    checks.append(Check("eikonal.vartheta_monotone", bad == 0, -float(bad), 1.0,
                        {"sign_violations": bad}))

    line = line_example(cfg.alpha)
    rep = eikonal_margin(line.operator, line.g, line.weight, line.gamma, "pointwise",
                         range(1, 10_001), domain=in_naturals, tolerance=1e-12)
    checks.append(Check("eikonal.pointwise_line", rep.passed, rep.worst_normalized, 1.0,
                        rep.to_dict()))
    quad = make_example("quadrant:2", cfg.alpha)
    rep = quad.eikonal_report()
    checks.append(Check("eikonal.pointwise_quadrant:2", rep.passed, rep.worst_normalized, 1.0,
                        rep.to_dict()))
    return checks


# --------------------------------------------------------------------------
# rellich


def broken_line_instance(gamma: float = BROKEN_GAMMA, exponent: float = BROKEN_EXPONENT):
    """Line instance with ``g = n^0.99`` and a γ far below the admissible constant."""
    line = line_example()
    def g(n):
        return float(n) ** exponent
    return line, RellichInstance(line.operator, line.weight, g, gamma, in_naturals, "broken-line")


def _rellich_examples(cfg: RunConfig) -> list:
    if cfg.suite != "all":
        return [(cfg.example, cfg.alpha)]
    return [("line", 0.25), ("line", 0.5), ("line", 0.75), ("quadrant:2", 0.5),
            ("log-line", None), ("schrodinger-line", 0.5)]


def suite_rellich(ctx: Context) -> list:
    cfg = ctx.cfg
    checks = []
    reports = []
    for name, alpha in _rellich_examples(cfg):
        if name.startswith("lattice"):
            ex = make_example(name, alpha or cfg.alpha, cfg.support_radius, table=ctx.table())
        else:
            ex = make_example(name, alpha or cfg.alpha, cfg.support_radius)
        rep = ex.rellich_sweep(cfg.samples, cfg.seed, gamma=cfg.gamma)
        reports.append(rep)
        label = name if alpha is None or name == "log-line" else f"{name}@{alpha}"
        chk = _sweep_check(f"rellich.{label}", rep)
        chk.details["gamma"] = rep.parameters["gamma"]
        checks.append(chk)
    incons = [r.name for r in reports if r.chain_consistent is False]
    checks.append(Check("rellich.chain_consistency", not incons, -float(len(incons)), 1.0,
                        {"inconsistent": incons, "n_sweeps": len(reports)}))

    line, broken = broken_line_instance()
    ext = extremal_test_function(broken, list(range(1, 401)))
    rep = rellich_sweep(broken, line.sampler(), min(cfg.samples, 200), cfg.seed, extra=(ext.phi,))
    checks.append(Check("rellich.broken_instance_detected", not rep.passed, rep.worst_normalized,
                        rep.worst_scale, {"gamma": broken.gamma, "exponent": BROKEN_EXPONENT,
                                          "extremal_ratio": ext.ratio,
                                          "n_violations": rep.n_violations}))
    return checks


# --------------------------------------------------------------------------
# green


def suite_green(ctx: Context) -> list:
    from .green import (LatticeWindow, axis_profile, green_hardy_weight, loglog_slope,
                        symmetry_defect, transition_step)

    cfg = ctx.cfg
    d, R = cfg.dim, cfg.radius
    table = ctx.table()
    checks = []
    ks, G = axis_profile(table, max(1, R // 4), R // 2)
    slope = loglog_slope(ks, G)
    target = -(d - 2)
    checks.append(Check("green.decay_slope", abs(slope - target) <= 0.15, 0.15 - abs(slope - target),
                        1.0, {"slope": slope, "target": target, "range": [int(ks[0]), int(ks[-1])]}))
    ks_all, G_all = axis_profile(table, 0, (2 * R) // 3)
    mono = bool(np.all(np.diff(G_all) < 0))
    checks.append(Check("green.axis_monotone", mono, 0.0, 1.0, {"range": [0, int(ks_all[-1])]}))
    sym = symmetry_defect(table.values)
    checks.append(Check("green.symmetry", sym <= 1e-12, -sym, 1.0, {"defect": sym}))

    w = green_hardy_weight(table)
    r = np.sqrt((table.window.coordinates() ** 2).sum(axis=0))
    band = w.region & (r >= 10) & (r <= R / 3)
    target_w = (d - 2) ** 2 / 4
    if band.any():
        prod = w.array[band] * r[band] ** 2
        dev = float(np.abs(prod / target_w - 1).max())
        lo, hi = float(prod.min()), float(prod.max())
    else:
        dev, lo, hi = math.inf, math.nan, math.nan
    checks.append(Check("green.weight_asymptotics", dev <= 0.15, 0.15 - dev, target_w,
                        {"min": lo, "max": hi, "target": target_w, "n_sites": int(band.sum())}))
    trust = table.trust_mask()
    positive = bool(np.all(table.values[trust] > 0)) and not w.flagged and bool(w.region.any())
    checks.append(Check("green.weight_positive", positive, float(np.nanmin(w.array[w.region]))
                        if w.region.any() else -1.0, 1.0,
                        {"trust_sites": int(trust.sum()), "flagged": len(w.flagged),
                         **table.metadata()}))

    # step-level properties on a small box: parity zeros, mass loss only by absorption
    state = LatticeWindow.delta(d, 8)
    coords = state.coordinates()
    parity = np.abs(coords).sum(axis=0) % 2
    zero_ok, mass_ok = True, True
    prev_mass = 1.0
    for n in range(1, 41):
        state = transition_step(state)
        zero_ok &= bool(np.all(state.values[parity != n % 2] == 0.0))
        mass = state.mass
        mass_ok &= mass <= prev_mass + 1e-15
        prev_mass = mass
    leak = np.diff(table.leakage)
    leak_ok = bool(np.all(leak >= -1e-15))
    checks.append(Check("green.step_invariants", zero_ok and mass_ok and leak_ok, 0.0, 1.0,
                        {"parity_zeros": zero_ok, "mass_nonincreasing": mass_ok,
                         "leakage_monotone": leak_ok}))
    return checks


# --------------------------------------------------------------------------
# solve


def suite_solve(ctx: Context) -> list:
    cfg = ctx.cfg
    line = line_example(cfg.alpha)
    H = line.operator
    f = FiniteFunction(parse_rhs(cfg.f))
    exh = Exhaustion.balls(H.graph, 1, cfg.stages, in_naturals)
    gamma = cfg.gamma if cfg.gamma is not None else line.gamma

    def ratio(u):
        return bound_report(u, f, line.g, line.weight, H.measure, gamma)

    rep = exhaustion_solve(H, f, exh, domain=in_naturals, bound=ratio)
    worst_res = max(rep.residuals)
    ratios = rep.ratios
    nondecreasing = all(b >= a - 1e-12 for a, b in zip(ratios, ratios[1:]))
    return [
        Check("solve.stage_residual", worst_res <= 1e-9, -worst_res, 1.0,
              {"residuals": rep.residuals, "stabilized_residual": rep.stabilized_residual}),
        Check("solve.monotone", rep.monotone, 0.0, 1.0, {"n_stages": len(rep.stages)}),
        Check("solve.bound_ratio", max(ratios) <= 1.0, 1.0 - max(ratios), 1.0,
              {"ratios": ratios, "gamma": gamma, "nondecreasing": nondecreasing,
               "converged": rep.converged, "increments": rep.increments, "note": rep.note}),
    ]


SUITES: dict[str, Callable[[Context], list]] = {
    "identities": suite_identities,
    "hardy": suite_hardy,
    "eikonal": suite_eikonal,
    "rellich": suite_rellich,
    "green": suite_green,
    "solve": suite_solve,
}


def run_suite(cfg: RunConfig, timings: dict | None = None) -> dict:
    """Run the configured suite and return the report dictionary.

    If ``timings`` is a dict it receives wall-clock seconds per suite part.
    """
    ctx = Context(cfg)
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    checks = []
    for name in names:
        t0 = time.perf_counter()
        checks.extend(SUITES[name](ctx))
        if timings is not None:
            timings[name] = time.perf_counter() - t0
    checks.sort(key=lambda c: c.name)
    return {
        "schema": SCHEMA,
        "version": __version__,
        # the output path is where the report goes, not part of what it reports
        "config": {k: v for k, v in cfg.echo().items() if k != "out"},
        "checks": [c.to_dict() for c in checks],
        "n_checks": len(checks),
        "n_failed": sum(not c.passed for c in checks),
        "pass": all(c.passed for c in checks),
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
