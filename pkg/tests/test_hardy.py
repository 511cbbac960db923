import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.errors import DomainError, PositivityError
from hardyrellich.functions import ONE, FiniteFunction
from hardyrellich.graphs import LatticeGraph, LineGraph
from hardyrellich.hardy import (HardyWeight, export_weight_csv, hardy_margin, hardy_sweep,
                                hardy_terms, line_hardy_weight, line_weight,
                                line_weight_lower_bound, quadrant_hardy_weight, quadrant_weight,
                                supersolution_split, supersolution_weight)
from hardyrellich.instances import in_naturals, make_example
from hardyrellich.operators import SchrodingerOperator, laplacian
from hardyrellich.sampling import TestFunctionSampler

LINE = laplacian(LineGraph())
W1 = 2 - math.sqrt(2)


def test_line_weight_values():
    assert line_weight(1) == W1
    assert line_weight(2) == pytest.approx(2 - math.sqrt(1.5) - math.sqrt(0.5), rel=1e-14)
    assert round(line_weight(2), 7) == 0.0681483
    assert abs(line_weight(10) - line_weight(10, "series", 15)) <= 1e-12


def test_series_agreement_range():
    worst = max(abs(line_weight(k) - line_weight(k, "series", 20)) for k in range(2, 101))
    assert worst <= 1e-12


def test_series_large_index_terms_are_finite():
    # exact binomials stop at l = 25, log-gamma takes over beyond
    assert math.isfinite(line_weight(2, "series", 60))
    assert line_weight(2, "series", 60) == pytest.approx(line_weight(2), rel=1e-12)


def test_line_weight_errors():
    with pytest.raises(DomainError):
        line_weight(0)
    with pytest.raises(DomainError):
        line_weight(1, "series")
    with pytest.raises(DomainError):
        line_weight(3, "bogus")


def test_line_weight_lower_bound():
    assert W1 > 0.25
    assert all(line_weight(k) > line_weight_lower_bound(k) for k in range(2, 10_001))


def test_supersolution_reproduces_line_weight():
    w = supersolution_weight(LINE, float, 0.5)
    assert w(1) == pytest.approx(W1, rel=1e-15)
    for k in range(2, 201):
        assert w(k) == pytest.approx(line_weight(k), rel=1e-12)


def test_supersolution_agreement_degrades_slowly():
    # the per-edge cancellation is conditioned like 2k; still 1e-10 at k = 10^4
    w = supersolution_weight(LINE, float, 0.5)
    assert w(10_000) == pytest.approx(line_weight(10_000), rel=1e-10)


def test_constant_u_gives_zero_weight():
    w = supersolution_weight(LINE, ONE, 0.5)
    with pytest.raises(PositivityError):
        w(3)
    Hq = SchrodingerOperator(LineGraph(), potential=lambda x: 0.75)
    assert supersolution_weight(Hq, ONE, 0.5)(3) == 0.75


def test_harmonic_u_alpha_one_detects_harmonicity():
    w = supersolution_weight(LINE, float, 1.0)
    assert max(abs(w.fn(k)) for k in range(1, 1000)) <= 1e-12 * 2


def test_supersolution_validation():
    with pytest.raises(PositivityError, match="superharmonic"):
        supersolution_weight(LINE, lambda k: float(k * k), 0.5)(3)
    with pytest.raises(DomainError):
        supersolution_weight(LINE, float, 0.0)
    with pytest.raises(PositivityError):
        supersolution_weight(LINE, float, 0.5, window=[0, 1])


def test_quadrant_weight():
    assert quadrant_weight((1, 1)) == 2 * W1
    for d in (1, 2, 3, 5):
        assert quadrant_weight((1,) * d) == pytest.approx(d * W1, rel=1e-15)
    with pytest.raises(DomainError):
        quadrant_weight((0, 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 60), min_size=2, max_size=3))
def test_quadrant_weight_matches_supersolution(k):
    d = len(k)
    H = laplacian(LatticeGraph(d))
    w = supersolution_weight(H, lambda x: float(math.prod(x)) if min(x) > 0 else 0.0, 0.5)
    assert w(tuple(k)) == pytest.approx(quadrant_weight(tuple(k)), rel=1e-12)


def test_split_form_agrees():
    for k in range(1, 100):
        assert supersolution_split(LINE, float, k) == pytest.approx(line_weight(k), rel=1e-9)
    u = math.sqrt
    w = supersolution_weight(LINE, u, 0.5)
    for k in range(1, 60):
        assert supersolution_split(LINE, u, k) == pytest.approx(w(k), rel=1e-9)


def test_hardy_margin_examples():
    w = line_hardy_weight()
    assert hardy_margin(LINE, w, FiniteFunction()) == 0.0
    assert hardy_margin(LINE, w, FiniteFunction.delta(1)) == pytest.approx(math.sqrt(2), rel=1e-15)
    t = hardy_terms(LINE, w, FiniteFunction.delta(1))
    assert t.scale == pytest.approx(2 + W1)
    with pytest.raises(DomainError):
        hardy_margin(LINE, w, FiniteFunction.delta(0))


def test_hardy_sweep_line():
    w = line_hardy_weight()
    rep = hardy_sweep(LINE, w, TestFunctionSampler(range(1, 201)), 1000, seed=3)
    assert rep.n_samples == 1000 and rep.passed
    assert rep.worst_normalized > 0
    assert "falsification" in rep.note


def test_hardy_ground_state_profile_is_nearly_sharp():
    # u^{1/2} cut off at a large radius approaches equality: the weight is optimal
    w = line_hardy_weight()
    phi = FiniteFunction({k: math.sqrt(k) * max(0.0, 1 - math.log(k) / math.log(4000))
                          for k in range(1, 4000)})
    t = hardy_terms(LINE, w, phi)
    assert 0 < t.margin / t.scale < 0.05


def test_quadrant_sweeps():
    for name in ("quadrant:2", "quadrant:3"):
        assert make_example(name).hardy_sweep(300, 0).passed


def test_violating_weight_is_caught():
    too_big = HardyWeight(lambda k: 2.0 * line_weight(k), "2w", in_naturals)
    rep = hardy_sweep(LINE, too_big, TestFunctionSampler(range(1, 201)), 300,
                      extra=[FiniteFunction.delta(1)])
    assert not rep.passed and rep.n_violations > 0


def test_quadrant_hardy_weight_domain():
    w = quadrant_hardy_weight(2)
    assert w((1, 1)) == 2 * W1
    with pytest.raises(DomainError):
        w((0, 1))


def test_export_weight_csv(tmp_path):
    path = tmp_path / "w.csv"
    export_weight_csv(line_hardy_weight(), range(1, 6), path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["vertex", "w", "lower_bound"]
    assert float(rows[1][1]) == W1 and float(rows[1][2]) == 0.25
    assert len(rows) == 6
    export_weight_csv(quadrant_hardy_weight(2), [(1, 2)], path)
    assert list(csv.reader(path.open()))[1][0] == "1 2"


def test_sampled_margins_are_nonnegative_random():
    rng = np.random.default_rng(5)
    w = line_hardy_weight()
    for _ in range(200):
        supp = rng.choice(np.arange(1, 80), size=int(rng.integers(1, 20)), replace=False)
        phi = FiniteFunction({int(x): float(rng.normal()) for x in supp})
        t = hardy_terms(LINE, w, phi)
        assert t.margin >= -1e-9 * t.scale
