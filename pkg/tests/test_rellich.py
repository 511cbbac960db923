import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.errors import DomainError, PositivityError
from hardyrellich.functions import FiniteFunction
from hardyrellich.graphs import LineGraph
from hardyrellich.hardy import line_hardy_weight, line_weight
from hardyrellich.instances import in_naturals, line_example, make_example
from hardyrellich.operators import laplacian, restrict_to_domain, schrodinger_apply
from hardyrellich.reports import phi_from_json
from hardyrellich.rellich import (RellichInstance, extremal_test_function, pointwise_eikonal,
                                  rellich_margin, rellich_matrices, rellich_sweep)
from hardyrellich.sampling import TestFunctionSampler, sample_rng
from hardyrellich.suites import broken_line_instance

LINE = laplacian(LineGraph())
W1 = 2 - math.sqrt(2)


def half_line_instance(gamma=None):
    ex = line_example(0.5)
    return ex, ex.rellich_instance(gamma)


def test_zero_function():
    _, inst = half_line_instance()
    assert tuple(rellich_margin(inst, FiniteFunction())) == (0.0, 0.0, 0.0)


def test_delta_one():
    ex, inst = half_line_instance()
    t = rellich_margin(inst, FiniteFunction.delta(1))
    assert t.lhs == pytest.approx(2 / math.sqrt(W1), rel=1e-15)
    assert t.rhs == pytest.approx((1 - ex.gamma) * math.sqrt(W1), rel=1e-15)
    assert t.margin > 0


def test_robinson_case():
    # g = w: the left norm is the plain ℓ² norm of 1_φ Δφ
    w = line_hardy_weight()
    inst = RellichInstance(LINE, w, w, 0.3, in_naturals)
    phi = FiniteFunction({1: 1.0, 2: -0.5, 5: 2.0})
    t = rellich_margin(inst, phi)
    plain = math.sqrt(sum(schrodinger_apply(LINE, phi, x) ** 2 for x in phi))
    w2 = math.sqrt(sum(w(x) ** 2 * v * v for x, v in phi.items()))
    assert t.lhs == pytest.approx(plain, rel=1e-15)
    assert t.rhs == pytest.approx(0.7 * w2, rel=1e-15)


def test_instance_validation():
    w = line_hardy_weight()
    for bad in (0.0, 1.0, 1.2):
        with pytest.raises(DomainError):
            RellichInstance(LINE, w, float, bad)
    inst = RellichInstance(LINE, w, float, 0.3, in_naturals)
    with pytest.raises(DomainError):
        rellich_margin(inst, FiniteFunction.delta(0))
    with pytest.raises(PositivityError):
        rellich_margin(RellichInstance(LINE, w, lambda x: -1.0, 0.3), FiniteFunction.delta(2))


def test_weights_only_evaluated_on_support():
    seen = set()

    def g(x):
        seen.add(x)
        return float(x)
    inst = RellichInstance(LINE, line_hardy_weight(), g, 0.3, in_naturals)
    rellich_margin(inst, FiniteFunction({1: 1.0, 3: 1.0}))
    assert seen == {1, 3}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_scaling_covariance(seed):
    _, inst = half_line_instance()
    phi = TestFunctionSampler(range(1, 150), max_support=20).sample(np.random.default_rng(seed))[1]
    t = rellich_margin(inst, phi)
    for c in (-3, 0.5, 10):
        s = rellich_margin(inst, phi.scale(c))
        assert s.margin == pytest.approx(abs(c) * t.margin, rel=1e-14, abs=1e-14 * abs(c) * t.scale)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(["line", "quadrant:2", "log-line"]))
def test_subset_consistency(seed, name):
    ex = make_example(name)
    parent = ex.rellich_instance()
    dom = ex.graph_domain()
    restricted = RellichInstance(dom.restricted, ex.weight, ex.g, ex.gamma, ex.domain)
    phi = ex.sampler().sample(np.random.default_rng(seed))[1]
    a, b = rellich_margin(parent, phi), rellich_margin(restricted, phi)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-14)
    assert a.rhs == b.rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_schrodinger_reduction(seed):
    ex = make_example("schrodinger-line")
    m = ex.operator.measure
    weighted = ex.rellich_instance()
    flat = RellichInstance(LINE, lambda x: ex.weight(x) * m(x), ex.g, ex.gamma, in_naturals)
    phi = ex.sampler().sample(np.random.default_rng(seed))[1]
    a, b = rellich_margin(weighted, phi), rellich_margin(flat, phi)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-14)
    assert a.rhs == pytest.approx(b.rhs, rel=1e-14)
    assert abs(a.margin - b.margin) <= 1e-14 * a.scale


def test_schrodinger_weight_is_line_weight_over_measure():
    ex = make_example("schrodinger-line")
    for k in range(1, 200):
        assert ex.weight(k) * ex.operator.measure(k) == pytest.approx(line_weight(k), rel=1e-12)


def test_empty_sweep_is_vacuous():
    _, inst = half_line_instance()
    rep = rellich_sweep(inst, None, 0)
    assert rep.passed and rep.n_samples == 0 and rep.quantiles() == {}
    assert rep.eikonal is None and rep.chain_consistent is None


def test_line_sweep_passes_and_is_chain_consistent():
    ex, inst = half_line_instance()
    rep = rellich_sweep(inst, ex.sampler(), 1000, seed=1)
    assert rep.passed and rep.n_samples == 1000
    assert rep.eikonal_passed and rep.chain_consistent
    assert rep.parameters["gamma"] == ex.gamma


def test_worst_phi_replays_from_json():
    ex, inst = half_line_instance()
    rep = ex.rellich_sweep(200, seed=2)
    d = json.loads(rep.to_json())
    phi = phi_from_json(d["worst_phi"])
    assert phi == rep.worst_phi
    assert rellich_margin(inst, phi).margin == rep.worst_margin
    assert d["worst_family"] == "extra"


def test_extremal_is_minimal():
    ex, inst = half_line_instance()
    vs = list(range(1, 61))
    ext = extremal_test_function(inst, vs)
    t = rellich_margin(inst, ext.phi)
    assert t.lhs / (t.rhs / (1 - inst.gamma)) == pytest.approx(ext.ratio, rel=1e-9)
    rng = np.random.default_rng(0)
    for _ in range(300):
        phi = FiniteFunction({x: float(v) for x, v in zip(vs, rng.normal(size=len(vs)))})
        s = rellich_margin(inst, phi)
        assert s.lhs / (s.rhs / (1 - inst.gamma)) >= ext.ratio * (1 - 1e-12)
    assert not ext.violates(inst.gamma)


def test_rellich_matrices_match_margin():
    _, inst = half_line_instance()
    vs = [1, 2, 3, 4]
    A, dl, dr = rellich_matrices(inst, vs)
    phi = np.array([0.5, -1.0, 2.0, 0.25])
    t = rellich_margin(inst, FiniteFunction(dict(zip(vs, phi))))
    assert math.sqrt((A @ phi) ** 2 @ dl) == pytest.approx(t.lhs, rel=1e-14)
    assert (1 - inst.gamma) * math.sqrt(phi ** 2 @ dr) == pytest.approx(t.rhs, rel=1e-14)


def test_extremal_rejects_outside_vertices():
    _, inst = half_line_instance()
    with pytest.raises(DomainError):
        extremal_test_function(inst, [0, 1, 2])


def test_broken_instance_fails():
    line, broken = broken_line_instance()
    ext = extremal_test_function(broken, list(range(1, 401)))
    assert ext.violates(broken.gamma)
    rep = rellich_sweep(broken, line.sampler(), 200, extra=(ext.phi,))
    assert not rep.passed
    assert rep.eikonal_passed is False and rep.chain_consistent


def test_near_one_gamma_cannot_fail():
    # with γ = 0.999999 the right side carries the factor 1e-6: no φ can violate
    line, broken = broken_line_instance(gamma=0.999999)
    ext = extremal_test_function(broken, list(range(1, 401)))
    assert ext.ratio > 0.5 and not ext.violates(broken.gamma)


def test_extremal_ratio_decreases_with_support():
    _, broken = broken_line_instance()
    ratios = [extremal_test_function(broken, list(range(1, n + 1))).ratio for n in (50, 200, 400)]
    assert ratios[0] > ratios[1] > ratios[2]


def test_pointwise_eikonal_on_domain():
    ex, inst = half_line_instance()
    rep = pointwise_eikonal(inst, range(1, 500))
    assert rep.passed
    dom = restrict_to_domain(LINE, in_naturals)
    assert dom.dirichlet_potential(1) == 1.0


@pytest.mark.parametrize("name,alpha", [("line", 0.25), ("line", 0.75), ("quadrant:2", 0.5),
                                        ("log-line", 0.5), ("schrodinger-line", 0.5)])
def test_example_sweeps(name, alpha):
    rep = make_example(name, alpha).rellich_sweep(300, seed=4)
    assert rep.passed and rep.chain_consistent


def test_sampled_phis_random_seeds():
    ex, inst = half_line_instance()
    s = ex.sampler()
    for i in range(200):
        t = rellich_margin(inst, s.sample(sample_rng(123, 1, i))[1])
        assert t.margin >= -1e-9 * t.scale
