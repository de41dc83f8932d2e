"""Reproducible Monte-Carlo and expansion-accuracy experiments.

Replication ``j`` draws its sample from the Philox stream keyed by
``(master_seed, j)``, so results do not depend on how replications are
spread over worker threads.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .asymptotics import (first_order, gen_expectile_expansion, lp_expansion,
                          second_order)
from .config import ExperimentConfig
from .errors import DomainError
from .estimation import SortedSample, shortfall_sweep
from .riskmodel import sample
from .solver import solve_x_tau

__all__ = [
    "EXPANSION_HEADER",
    "MSE_HEADER",
    "ExpansionRow",
    "MseRow",
    "default_tau_grid",
    "run_expansion_compare",
    "run_mse_sweep",
    "format_csv",
    "write_csv",
]

EXPANSION_HEADER = ("tau", "x_exact", "x_first", "x_second", "relerr_first", "relerr_second")
MSE_HEADER = ("k", "rmse", "n_inadmissible", "n_effective")
TRUTH_TOL = 1e-9


@dataclass(frozen=True)
class ExpansionRow:
    tau: float
    x_exact: float
    x_first: float
    x_second: float
    relerr_first: float
    relerr_second: float


@dataclass(frozen=True)
class MseRow:
    k: int
    rmse: float
    n_inadmissible: int
    n_effective: int


def default_tau_grid(points: int = 40, hi: float = 0.05, lo: float = 1e-4) -> tuple[float, ...]:
    """Levels with ``1 - tau`` geometrically spaced from ``hi`` down to ``lo``."""
    return tuple(float(1.0 - t) for t in np.geomspace(hi, lo, points))


def _expansions(cfg: ExperimentConfig, tau: float) -> tuple[float, float]:
    risk, model = cfg.risk, cfg.model
    if risk.kind == "gen-expectile":
        return (gen_expectile_expansion(model, risk.p, risk.q, tau, order=1),
                gen_expectile_expansion(model, risk.p, risk.q, tau, order=2))
    if risk.kind in ("lp", "expectile"):
        p = 2.0 if risk.kind == "expectile" else risk.p
        return lp_expansion(model, p, tau, order=1), lp_expansion(model, p, tau, order=2)
    spec = risk.spec(model)
    return first_order(spec, tau), second_order(spec, tau)


def run_expansion_compare(cfg: ExperimentConfig) -> list[ExpansionRow]:
    """Exact ``x_tau`` next to its first- and second-order approximations.

    The closed-form specialisations are used for expectile, L^p and
    generalised-expectile risks; custom risks go through the generic engine.
    """
    spec = cfg.risk.spec(cfg.model)
    taus = cfg.taus if cfg.taus is not None else default_tau_grid()
    rows = []
    for tau in taus:
        try:
            exact = solve_x_tau(spec, tau, tol=TRUTH_TOL).x_tau
            x1, x2 = _expansions(cfg, tau)
        except Exception as exc:
            raise type(exc)(f"at tau={tau!r}: {exc}") from exc
        rows.append(ExpansionRow(tau, exact, x1, x2, abs(x1 / exact - 1.0), abs(x2 / exact - 1.0)))
    return rows


def _default_estimator(cfg: ExperimentConfig, tau: float):
    alpha, h1 = cfg.risk.estimator_args()

    def est(sorted_sample, ks):
        _, x, adm = shortfall_sweep(sorted_sample, ks, tau, alpha, h1)
        return x, adm

    return est


def run_mse_sweep(cfg: ExperimentConfig, estimator=None, truth: float | None = None) -> list[MseRow]:
    """Relative MSE of the extreme-level estimator as a function of ``k``.

    Parameters
    ----------
    cfg : ExperimentConfig
    estimator : callable, optional
        ``estimator(sorted_sample, ks) -> (x_hat, admissible)``; defaults to
        the Weissman-type shortfall estimator matching ``cfg.risk``.
    truth : float, optional
        Target value; computed with the exact solver when omitted.

    Returns
    -------
    list of MseRow
        ``rmse`` averages squared relative errors over admissible
        replications only; it is NaN when none are admissible.
    """
    tau = cfg.tau if cfg.tau is not None else 1.0 - 1.0 / cfg.n
    if truth is None:
        truth = solve_x_tau(cfg.risk.spec(cfg.model), tau, tol=TRUTH_TOL).x_tau
    lo, hi = cfg.k_range
    ks = np.arange(lo, hi + 1, cfg.k_step)
    if cfg.n * (1.0 - tau) > lo:
        raise DomainError(f"n(1 - tau) = {cfg.n * (1.0 - tau):.6g} exceeds the smallest k = {lo}")
    est = estimator if estimator is not None else _default_estimator(cfg, tau)

    sq = np.zeros((cfg.N, ks.size))
    ok = np.zeros((cfg.N, ks.size), dtype=bool)

    def work(j):
        s = SortedSample(sample(cfg.model, cfg.n, cfg.master_seed, stream=j))
        x, adm = est(s, ks)
        adm = np.asarray(adm, dtype=bool)
        err = np.where(adm, np.asarray(x, dtype=float) / truth - 1.0, 0.0)
        sq[j] = err * err
        ok[j] = adm

    if cfg.threads == 1:
        for j in range(cfg.N):
            work(j)
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(work, range(cfg.N)))

    # fixed reduction order over j, independent of scheduling
    n_eff = ok.sum(axis=0)
    total = sq.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rmse = np.where(n_eff > 0, total / np.maximum(n_eff, 1), np.nan)
    return [MseRow(int(k), float(r), int(cfg.N - e), int(e)) for k, r, e in zip(ks, rmse, n_eff)]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def format_csv(rows, header) -> str:
    """CSV text with shortest round-trip float formatting."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(getattr(row, h)) for h in header) + "\n")
    return buf.getvalue()


def write_csv(rows, header, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(rows, header))
