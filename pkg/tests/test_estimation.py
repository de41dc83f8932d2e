import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortfall.errors import DomainError
from shortfall.estimation import (SortedSample, hill, shortfall_estimate, shortfall_sweep,
                                  weissman_quantile)
from shortfall.riskmodel import Distortion, expectile_spec, make_model, sample
from shortfall.solver import solve_x_tau
from shortfall.specfun import beta_fn


def test_sorted_sample_basics():
    s = SortedSample([3.0, 1.0, 2.0, 5.0])
    assert s.n == 4
    assert s.order_stat(1) == 1.0 and s.order_stat(4) == 5.0
    assert s.threshold(1) == 3.0
    with pytest.raises(ValueError):
        s.values[0] = 9.0
    for bad in ([1.0], [1.0, np.nan], [1.0, np.inf]):
        with pytest.raises(DomainError):
            SortedSample(bad)
    for k in (0, 4):
        with pytest.raises(DomainError):
            s.threshold(k)


def test_hill_hand_example():
    s = [1.0, math.e, math.e ** 2]
    assert hill(s, 2) == pytest.approx(1.5, rel=1e-14)


def test_hill_constant_tail_is_zero():
    assert hill(np.full(20, 4.0), 10) == 0.0


def test_hill_rejects_nonpositive_threshold():
    with pytest.raises(DomainError):
        hill([-1.0, 0.0, 1.0, 2.0], 2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100.0), st.integers(5, 150))
def test_hill_scale_invariant(c, k):
    x = sample(make_model("pareto", gamma=0.4), 200, seed=5)
    assert hill(x * c, k) == pytest.approx(hill(x, k), abs=1e-12)


def test_hill_consistent_on_large_sample():
    x = sample(make_model("pareto", gamma=0.3), 200_000, seed=9)
    assert hill(x, 5000) == pytest.approx(0.3, abs=4 * 0.3 / math.sqrt(5000))


def test_weissman_hand_example():
    x = sample(make_model("pareto", gamma=0.5), 1000, seed=1)
    s = SortedSample(x)
    assert weissman_quantile(s, 100, 0.99, 1.0) == pytest.approx(10 * s.threshold(100), rel=1e-14)
    # n(1 - tau) = k: no extrapolation at all
    assert weissman_quantile(s, 100, 0.9, 0.7) == pytest.approx(s.threshold(100), rel=1e-12)


def test_weissman_on_exact_pareto_quantiles():
    g, n = 0.4, 10_000
    m = make_model("pareto", gamma=g)
    s = SortedSample(m.ppf((np.arange(1, n + 1) - 0.5) / n))
    est = weissman_quantile(s, 500, 0.9999, g)
    assert est == pytest.approx(m.ppf(0.9999), rel=0.01)


def test_weissman_domain():
    s = SortedSample(np.arange(1.0, 101.0))
    with pytest.raises(DomainError):
        weissman_quantile(s, 5, 0.9, 0.3)
    with pytest.raises(DomainError):
        weissman_quantile(s, 5, 1.0, 0.3)


def test_shortfall_estimate_formula():
    x = sample(make_model("pareto", gamma=0.25), 2000, seed=3)
    s = SortedSample(x)
    k, tau = 150, 0.9995
    g = hill(s, k)
    expected = (k / (s.n * (1 - tau))) ** g * (beta_fn(1 / g - 1, 2) / g) ** g * s.threshold(k)
    res = shortfall_estimate(s, k, tau, alpha=1.0)
    assert res.admissible and res.gamma_hat == pytest.approx(g, rel=1e-14)
    assert res.x_hat == pytest.approx(expected, rel=1e-12)
    assert res.q_hat == pytest.approx(weissman_quantile(s, k, tau, g), rel=1e-12)


def test_half_index_gives_quantile():
    # (B(1, 2) / (1/2))**(1/2) = 1: near gamma_hat = 1/2 the expectile and the quantile agree
    m = make_model("pareto", gamma=0.5)
    t = SortedSample(m.ppf((np.arange(1, 1001) - 0.5) / 1000))
    r = shortfall_estimate(t, 100, 0.999, 1.0)
    factor = (beta_fn(1 / r.gamma_hat - 1, 2) / r.gamma_hat) ** r.gamma_hat
    assert r.x_hat / r.q_hat == pytest.approx(factor, rel=1e-12)
    assert factor == pytest.approx(1.0, abs=0.05)


def test_inadmissible_when_tail_too_heavy():
    x = sample(make_model("pareto", gamma=1.5), 1000, seed=4)
    res = shortfall_estimate(x, 100, 0.999, alpha=1.0)
    assert not res.admissible and res.x_hat is None
    assert res.q_hat > 0


def test_tvar_distortion_shifts_level():
    x = sample(make_model("pareto", gamma=0.25), 2000, seed=8)
    a = shortfall_estimate(x, 100, 0.98, 1.0, Distortion.tvar(0.95))
    b = shortfall_estimate(x, 100, 0.95 + 0.05 * 0.98, 1.0)
    assert a.x_hat == pytest.approx(b.x_hat, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 50.0))
def test_estimate_scale_equivariant(c):
    x = sample(make_model("frechet", gamma=0.3), 500, seed=12)
    a = shortfall_estimate(x, 50, 0.999, 1.0)
    b = shortfall_estimate(x * c, 50, 0.999, 1.0)
    assert b.x_hat == pytest.approx(c * a.x_hat, rel=1e-10)


def test_estimate_increasing_in_level():
    x = sample(make_model("burr", gamma=0.2, rho=-1.0), 1000, seed=6)
    vals = [shortfall_estimate(x, 80, t, 1.0).x_hat for t in (0.95, 0.99, 0.999, 0.9999)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_sweep_matches_single_estimates():
    x = SortedSample(sample(make_model("gpd", gamma=0.3, theta=1.0), 800, seed=10))
    ks = np.arange(5, 400, 17)
    g, xs, adm = shortfall_sweep(x, ks, 0.999, 1.0)
    for k, gi, xi, a in zip(ks, g, xs, adm):
        res = shortfall_estimate(x, int(k), 0.999, 1.0)
        assert res.gamma_hat == pytest.approx(gi, rel=1e-13)
        assert bool(a) == res.admissible
        if a:
            assert res.x_hat == pytest.approx(xi, rel=1e-13)


def test_sweep_domain():
    x = SortedSample(np.arange(1.0, 11.0))
    with pytest.raises(DomainError):
        shortfall_sweep(x, [0, 3], 0.99, 1.0)
    with pytest.raises(DomainError):
        shortfall_sweep(x, [3], 0.99, 0.0)


def test_estimator_accuracy_at_moderate_sample_size():
    # at least 90% of replications within 15% of the truth
    m = make_model("pareto", gamma=0.2)
    truth = solve_x_tau(expectile_spec(m), 0.999).x_tau
    hits = 0
    for j in range(200):
        res = shortfall_estimate(sample(m, 1000, seed=2024, stream=j), 100, 0.999, 1.0)
        hits += res.admissible and abs(res.x_hat / truth - 1) <= 0.15
    assert hits / 200 >= 0.9
