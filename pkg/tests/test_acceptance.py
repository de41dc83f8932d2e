"""End-to-end acceptance checks, one marker per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import itertools
import math
import time

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortfall import cli
from shortfall.asymptotics import gen_expectile_expansion, lp_expansion, second_order
from shortfall.config import ExperimentConfig, RiskConfig
from shortfall.estimation import SortedSample, shortfall_estimate, shortfall_sweep
from shortfall.riskmodel import expectile_spec, gen_expectile_spec, lp_spec, make_model, sample
from shortfall.simulation import run_expansion_compare, run_mse_sweep
from shortfall.solver import gap, solve_x_tau
from shortfall.specfun import beta_fn, delta0, gamma1_const, gamma2_const

criterion1 = pytest.mark.acceptance(1, "constants vs quadrature")
criterion2 = pytest.mark.acceptance(2, "second-order expansion accuracy (GPD)")
criterion3 = pytest.mark.acceptance(3, "solver closed-form truths")
criterion4 = pytest.mark.acceptance(4, "estimator CLT at desk scale")
criterion5 = pytest.mark.acceptance(5, "rMSE sweep shapes")
criterion6 = pytest.mark.acceptance(6, "invariant suites")


# 1. constants against their defining integrals

GRID = list(itertools.product((0.2, 1 / 3, 0.5), (1.0, 1.5, 2.0), (-0.25, -0.5, -0.9)))
BETA1 = 1.5


def _quad(f):
    return float(mp.quad(f, [1, 2, 10, mp.inf]))


def _delta0_integral(g, a, b):
    # -int_1^inf (y - 1)^a d(y^-r)
    r = mp.mpf(b) / g
    return _quad(lambda y: r * y ** (-r - 1) * (y - 1) ** a)


def _gamma1_integral(g, a, b, eta):
    # -int_1^inf J(y - 1) d(y^-r),  J(x) = x^a (x^eta - 1) / eta
    r = mp.mpf(b) / g
    return _quad(lambda y: r * y ** (-r - 1) * (y - 1) ** a * ((y - 1) ** eta - 1) / eta)


def _gamma2_integral(g, a, b, rho):
    # -int_1^inf (y - 1)^a d[y^-r (y^rho - 1) / rho]
    r = mp.mpf(b) / g
    return _quad(lambda y: (y - 1) ** a * ((r - rho) * y ** rho - r) * y ** (-r - 1) / rho)


@criterion1
def test_constants_match_quadrature():
    start = time.perf_counter()
    with mp.workdps(30):
        for g, a, third in GRID:
            assert delta0(g, a, BETA1) == pytest.approx(_delta0_integral(g, a, BETA1), rel=1e-8)
            assert gamma1_const(g, a, BETA1, third) == pytest.approx(
                _gamma1_integral(g, a, BETA1, third), rel=1e-8), (g, a, third)
            assert gamma2_const(g, a, BETA1, third) == pytest.approx(
                _gamma2_integral(g, a, BETA1, third), rel=1e-8), (g, a, third)
    assert time.perf_counter() - start < 5.0


# 2. second-order expansion beats first order on the 40-point grid


@criterion2
@pytest.mark.parametrize("gamma", [1 / 3, 1 / 5], ids=["1/3", "1/5"])
def test_second_order_beats_first_order(gamma):
    start = time.perf_counter()
    cfg = ExperimentConfig("expansion-compare", make_model("gpd", gamma=gamma, theta=1.0),
                           RiskConfig("gen-expectile", p=0.95, q=0.95))
    rows = run_expansion_compare(cfg)
    assert len(rows) == 40
    assert rows[0].tau == pytest.approx(0.95) and rows[-1].tau == pytest.approx(0.9999)
    worse = [r.tau for r in rows if not r.relerr_second < r.relerr_first]
    assert not worse
    if gamma == 1 / 5:
        assert rows[-1].relerr_second < 0.02
    assert time.perf_counter() - start < 60.0


# 3. closed-form truths at tau = 1/2


@criterion3
def test_solver_ground_truths():
    start = time.perf_counter()
    for g in (0.2, 1 / 3, 0.45):
        gpd = make_model("gpd", gamma=g, theta=1.0)
        assert solve_x_tau(expectile_spec(gpd), 0.5).x_tau == pytest.approx(g / (1 - g), abs=1e-6)
        par = make_model("pareto", gamma=g)
        assert solve_x_tau(expectile_spec(par), 0.5).x_tau == pytest.approx(1 / (1 - g), abs=1e-6)
        for p in (0.5, 0.95):
            q = gpd.ppf(p)
            cond_mean = (q + g) / (1 - g)  # E[X | X > q] for the GPD with theta = 1
            rep = solve_x_tau(gen_expectile_spec(gpd, p, p), 0.5)
            assert rep.x_tau == pytest.approx(cond_mean, abs=1e-6)
    assert time.perf_counter() - start < 10.0


# 4. studentised estimation error


def _studentised_errors(gamma, n=2000, k=200, reps=1000, seed=2024):
    m = make_model("pareto", gamma=gamma)
    tau = 1.0 - 1.0 / n
    truth = solve_x_tau(expectile_spec(m), tau).x_tau
    scale = math.sqrt(k) / math.log(k / (n * (1.0 - tau)))
    z = np.empty(reps)
    for j in range(reps):
        res = shortfall_estimate(sample(m, n, seed, stream=j), k, tau, alpha=1.0)
        assert res.admissible
        z[j] = scale * (res.x_hat / truth - 1.0) / gamma
    return z


@criterion4
@pytest.mark.parametrize("gamma", [0.2, 1 / 3], ids=["0.2", "1/3"])
def test_studentised_error_is_standard(gamma):
    start = time.perf_counter()
    z = _studentised_errors(gamma)
    mean, var = float(z.mean()), float(z.var(ddof=1))
    assert abs(mean) <= 0.15, f"mean {mean:.4f}, variance {var:.4f}"
    assert 0.8 <= var <= 1.25, f"mean {mean:.4f}, variance {var:.4f}"
    assert time.perf_counter() - start < 90.0


# 5. rMSE sweeps

SWEEP_MODELS = {
    "pareto": {},
    "frechet": {},
    "burr": {"rho": -2.0},
}


def _sweep(name, gamma, n):
    cfg = ExperimentConfig("mse-sweep", make_model(name, gamma=gamma, **SWEEP_MODELS[name]),
                           RiskConfig("gen-expectile", p=0.95, q=0.95), n=n, N=500,
                           master_seed=1, threads=4)
    rows = run_mse_sweep(cfg)
    k = np.array([r.k for r in rows])
    rmse = np.array([r.rmse for r in rows])
    assert sum(r.n_inadmissible for r in rows) == 0
    return k, rmse


@pytest.fixture(scope="module")
def sweeps():
    start = time.perf_counter()
    out = {(name, g, n): _sweep(name, g, n)
           for name in SWEEP_MODELS for g in (1 / 3, 1 / 5) for n in (500, 1000)}
    return out, time.perf_counter() - start


@criterion5
def test_pareto_has_no_rising_branch(sweeps):
    res, elapsed = sweeps
    assert elapsed < 600.0
    for g in (1 / 3, 1 / 5):
        for n in (500, 1000):
            k, rmse = res[("pareto", g, n)]
            assert k[-1] == 2 * n // 3
            assert rmse[-1] <= 1.5 * rmse.min(), (g, n)


@criterion5
def test_frechet_bias_exceeds_burr(sweeps):
    res, _ = sweeps
    for g in (1 / 3, 1 / 5):
        for n in (500, 1000):
            kf, rf = res[("frechet", g, n)]
            kb, rb = res[("burr", g, n)]
            assert rf[kf == n // 2][0] > rb[kb == n // 2][0], (g, n)


@criterion5
def test_heavier_tail_is_harder(sweeps):
    res, _ = sweeps
    for name in SWEEP_MODELS:
        for n in (500, 1000):
            assert res[(name, 1 / 3, n)][1].min() > res[(name, 1 / 5, n)][1].min(), (name, n)


# 6. invariants


@criterion6
@settings(max_examples=200, deadline=None)
@given(st.floats(1e-2, 50.0), st.floats(1e-2, 50.0))
def test_beta_symmetry_and_recurrence(a, b):
    assert beta_fn(a, b) == pytest.approx(beta_fn(b, a), rel=1e-13)
    assert (a + b) * beta_fn(a, b + 1) == pytest.approx(b * beta_fn(a, b), rel=1e-12)


INVARIANT_SPECS = [
    expectile_spec(make_model("gpd", gamma=1 / 3, theta=1.0)),
    lp_spec(make_model("burr", gamma=0.2, rho=-2.0), 2.5),
    gen_expectile_spec(make_model("frechet", gamma=0.25), 0.9, 0.95),
]


@criterion6
@pytest.mark.parametrize("spec", INVARIANT_SPECS, ids=lambda s: s.model.name)
def test_levels_monotone_with_strict_sign_change(spec):
    tol = 1e-9
    xs = []
    for tau in (0.3, 0.7, 0.95, 0.999):
        x = solve_x_tau(spec, tau, tol=tol).x_tau
        eps = 10 * tol * max(1.0, abs(x))
        assert gap(spec, tau, x - eps) > 0 > gap(spec, tau, x + eps)
        xs.append(x)
    assert all(a < b for a, b in zip(xs, xs[1:]))


@criterion6
@pytest.mark.parametrize("spec", INVARIANT_SPECS, ids=lambda s: s.model.name)
def test_solver_scale_equivariance(spec):
    c = 2.5
    scaled = spec.with_model(spec.model.scaled(c))
    assert solve_x_tau(scaled, 0.99).x_tau == pytest.approx(c * solve_x_tau(spec, 0.99).x_tau, rel=1e-8)


@criterion6
def test_estimator_scale_equivariance():
    x = SortedSample(sample(make_model("burr", gamma=0.25, rho=-1.0), 1000, seed=4))
    ks = np.arange(10, 600, 10)
    _, a, adm_a = shortfall_sweep(x, ks, 0.999, 1.0)
    _, b, adm_b = shortfall_sweep(x.scaled(7.0), ks, 0.999, 1.0)
    assert np.array_equal(adm_a, adm_b)
    assert np.allclose(b[adm_b], 7.0 * a[adm_a], rtol=1e-12, atol=0)


@criterion6
def test_simulate_bytes_independent_of_threads(tmp_path, capsys):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text('[model]\nname = "frechet"\ngamma = 0.25\n\n'
                   '[risk]\nkind = "gen-expectile"\np = 0.95\nq = 0.95\n\n'
                   '[experiment]\nkind = "mse-sweep"\nn = 300\nN = 40\nmaster_seed = 5\n')
    blobs = []
    for threads in (1, 4):
        dest = tmp_path / f"t{threads}.csv"
        assert cli.main(["--threads", str(threads), "simulate", str(cfg), "--out", str(dest)]) == 0
        blobs.append(dest.read_bytes())
    assert blobs[0] == blobs[1]


@criterion6
@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(0.0, 0.98), st.floats(0.0, 0.98),
       st.floats(0.99, 0.99999), st.sampled_from(["gpd", "frechet", "burr"]))
def test_generic_second_order_matches_specialised(gamma, p, q, tau, name):
    kw = {"theta": 1.0} if name == "gpd" else {"rho": -1.5} if name == "burr" else {}
    m = make_model(name, gamma=gamma, **kw)
    p, q = min(p, q), max(p, q)
    assert second_order(gen_expectile_spec(m, p, q), tau) == pytest.approx(
        gen_expectile_expansion(m, p, q, tau), rel=1e-9)
    if gamma < 0.5:
        assert second_order(lp_spec(m, 3.0), tau) == pytest.approx(lp_expansion(m, 3.0, tau), rel=1e-9)
