import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.eikonal import (AdmissibleFamily, admissibility_check, corollary_constants,
                                  eikonal_margin, gamma_log, gamma_power, vartheta_log,
                                  vartheta_power, x_epsilon)
from hardyrellich.errors import DomainError
from hardyrellich.functions import FiniteFunction
from hardyrellich.graphs import LatticeGraph, LineGraph
from hardyrellich.hardy import line_hardy_weight, supersolution_weight
from hardyrellich.instances import in_naturals, line_example
from hardyrellich.operators import laplacian
from hardyrellich.sampling import TestFunctionSampler, sample_rng

EPS = 2 ** -0.5
ALPHAS = [round(0.1 * i, 1) for i in range(1, 10)]
LINE = laplacian(LineGraph())


def test_gamma_power_value():
    # the closed form ((1 - 2^{-1/4})/(1 - 2^{-1/2}))² evaluates to 0.2950810
    assert gamma_power(0.5, EPS) == pytest.approx(0.295084, abs=1e-5)
    assert gamma_power(0.5, EPS) == pytest.approx(
        ((1 - 2 ** -0.25) / (1 - 2 ** -0.5)) ** 2, rel=1e-15)


def test_gamma_power_small_eps_behaviour():
    # γ(ε) - 1 = O(ε^α): slow for small α, so the ε -> 0 limit is checked by its rate
    for a in ALPHAS:
        for eps in (1e-4, 1e-8):
            g = gamma_power(a, eps)
            assert g < 1
            assert abs(1 - g) <= 2.5 * eps ** a
    assert gamma_power(0.9, 1e-8) == pytest.approx(1, abs=1e-6)


def test_gamma_power_near_one():
    for a in ALPHAS:
        assert gamma_power(a, 1 - 1e-6) == pytest.approx(a * a, abs=1e-4)


@pytest.mark.parametrize("a", ALPHAS)
def test_gamma_power_bounds(a):
    g = gamma_power(a, EPS)
    assert a * a < g < a * a * 2 ** (1 - a)


def test_gamma_log_value():
    assert gamma_log(1.0, EPS) == pytest.approx(0.6083, abs=5e-4)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.01, 0.98), st.floats(0.001, 0.01))
def test_gamma_log_monotone(c, e1, de):
    e2 = e1 + de
    assert gamma_log(c, e1) > gamma_log(c, e2)
    assert gamma_log(c, e1) >= gamma_log(c * 1.5, e1)


def test_gamma_domain_errors():
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(DomainError):
            gamma_power(bad, EPS)
        with pytest.raises(DomainError):
            gamma_power(0.5, bad)
    with pytest.raises(DomainError):
        gamma_log(0.0, EPS)


def test_corollary_constants():
    assert corollary_constants("power", 2, alpha=0.5) == gamma_power(0.5, EPS)
    assert corollary_constants("log", 2, c=1.0) == pytest.approx(0.6083, abs=5e-4)
    for d in (2, 3, 4):
        for a in (0.25, 0.5, 0.75):
            D = 2 * d
            expected = ((1 - D ** (-a / 2)) / (1 - D ** -0.5)) ** 2
            assert corollary_constants("power", D, alpha=a) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        corollary_constants("power", 1.5, alpha=0.5)
    with pytest.raises(DomainError):
        corollary_constants("power", 2)
    with pytest.raises(DomainError):
        corollary_constants("exp", 2)


def test_vartheta_continuity():
    for a in ALPHAS:
        assert vartheta_power(1.0, a) == pytest.approx(a * a, rel=1e-15)
        near = vartheta_power(np.array([1 - 1e-7, 1 + 1e-7, 1 - 2e-6, 1 + 2e-6]), a)
        assert np.allclose(near, a * a, rtol=0, atol=1e-8 + 4e-6)
    for t in (0.01, 1.0, 50.0):
        exact = t * t / ((t + 1) ** 2 * math.log1p(t) ** 2)
        assert vartheta_log(1.0, t) == pytest.approx(exact, rel=1e-15)
        for h in (1e-7, -1e-7, 2e-6, -2e-6):
            assert abs(vartheta_log(1 + h, t) - exact) <= 1e-8 + 10 * abs(h)


def test_vartheta_monotone_grids():
    t = np.geomspace(1e-4, 1e4, 10_000)
    for a in ALPHAS:
        assert np.all(np.diff(vartheta_power(t, a)) < 0)
    a = np.geomspace(1e-3, 1e3, 10_000)
    for tv in (1e-2, 0.3, 1.0, 30.0, 1e3):
        assert np.all(np.diff(vartheta_log(a, tv)) < 0)
    tt = np.geomspace(1e-2, 1e3, 10_000)
    for av in (1e-3, 0.5, 2.0, 1e3):
        assert np.all(np.diff(vartheta_log(av, tt)) <= 0)


def test_admissibility_a_equal_one_row():
    fam = AdmissibleFamily.power(0.5)
    res = admissibility_check(fam, EPS, gamma_power(0.5, EPS),
                              grid=(np.geomspace(1e-3, 1e3, 50), np.array([1.0])))
    assert res.worst == 0.0


@pytest.mark.parametrize("a", ALPHAS)
def test_power_admissible_and_sharp(a):
    fam = AdmissibleFamily.power(a)
    g = gamma_power(a, EPS)
    assert admissibility_check(fam, EPS, g).passed()
    probe = admissibility_check(fam, EPS, 0.9 * g)
    assert probe.worst > 1e-12
    assert probe.worst_at[1] == pytest.approx(EPS)


@pytest.mark.parametrize("c", [0.5, 1.0, 4.0])
def test_log_admissible_and_sharp(c):
    fam = AdmissibleFamily.log(c)
    g = gamma_log(c, EPS)
    assert admissibility_check(fam, EPS, g).passed()
    assert admissibility_check(fam, EPS, g, product_floor=False).passed()
    probe = admissibility_check(fam, EPS, 0.9 * g, product_floor=False)
    assert probe.worst > 1e-12
    assert probe.worst_at == pytest.approx((c, EPS))


def test_family_validation():
    with pytest.raises(DomainError):
        AdmissibleFamily("exp")
    with pytest.raises(DomainError):
        AdmissibleFamily.log(-1.0)
    assert AdmissibleFamily.log(1.0).gamma(EPS) == gamma_log(1.0, EPS)


def test_eikonal_constant_g():
    w = line_hardy_weight()
    rep = eikonal_margin(LINE, lambda x: 3.0, w, 0.3, "pointwise", range(2, 50))
    assert rep.passed
    assert all(rep.margins[k] == pytest.approx(0.3 * 3.0 * w(k)) for k in range(2, 50))


def test_eikonal_line_pointwise():
    ex = line_example(0.5)
    rep = eikonal_margin(LINE, ex.g, ex.weight, ex.gamma, "pointwise", range(1, 10_001),
                         domain=in_naturals, tolerance=1e-12)
    assert rep.passed and rep.worst_normalized > 0
    d = rep.to_dict()
    assert d["n"] == 10_000 and d["pass"]


def test_eikonal_fails_with_small_gamma():
    ex = line_example(0.5)
    rep = eikonal_margin(LINE, ex.g, ex.weight, 0.5 * ex.gamma, "pointwise", range(1, 200),
                         domain=in_naturals)
    assert not rep.passed


def test_pointwise_implies_weak():
    ex = line_example(0.5)
    sampler = TestFunctionSampler(range(1, 120))
    phis = [sampler.sample(sample_rng(0, 9, i))[1] for i in range(300)]
    rep = eikonal_margin(LINE, ex.g, ex.weight, ex.gamma, "weak", phis)
    assert rep.passed and len(rep.margins) == 300
    with pytest.raises(DomainError):
        eikonal_margin(LINE, ex.g, ex.weight, ex.gamma, "strong", [])
    single = eikonal_margin(LINE, ex.g, ex.weight, ex.gamma, "weak", FiniteFunction.delta(3))
    assert list(single.margins) == [0]


def test_x_epsilon():
    window = range(1, 40)
    assert x_epsilon(LineGraph(), lambda k: 2.0, 1.0, window) == set(window)
    assert x_epsilon(LineGraph(), float, 2 ** -0.5, window) == set(range(2, 40))
    lat = LatticeGraph(2)
    u = lambda k: 1.0 / (1 + abs(k[0]) + abs(k[1]))  # noqa: E731
    win = [(i, j) for i in range(-4, 5) for j in range(-4, 5)]
    # 1/(1+|k|_1) is not superharmonic everywhere, but its neighbour ratios stay above 1/D
    assert x_epsilon(lat, u, 0.5, win) == set(win)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_admissibility_transfer(a):
    # g = (θ∘u^{1/2})² with θ = t^a is g = n^a for u = n; X_ε = {n >= 2}
    w = supersolution_weight(LINE, float, 0.5)
    x_eps = x_epsilon(LineGraph(), float, EPS, range(1, 3000))
    rep = eikonal_margin(LINE, lambda n: float(n) ** a, w, gamma_power(a, EPS), "pointwise",
                         sorted(x_eps), domain=in_naturals)
    assert rep.worst_normalized >= -1e-10
