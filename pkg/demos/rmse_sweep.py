"""Relative MSE against k for three tails with the same index.

A pure Pareto tail has no bias, so its curve flattens as k grows; the
Frechet tail has a slowly vanishing second-order term and its curve turns
upward; the Burr tail with rho = -2 sits in between.
"""
import numpy as np

from shortfall import ExperimentConfig, RiskConfig, make_model, run_mse_sweep

risk = RiskConfig("gen-expectile", p=0.95, q=0.95)
models = {
    "pareto": make_model("pareto", gamma=0.2),
    "frechet": make_model("frechet", gamma=0.2),
    "burr": make_model("burr", gamma=0.2, rho=-2.0),
}
n = 500
show = np.array([10, 25, 50, 100, 150, 200, 250, 300, 333])

print("k      " + "".join(f"{name:>12}" for name in models))
curves = {}
for name, model in models.items():
    cfg = ExperimentConfig("mse-sweep", model, risk, n=n, N=300, master_seed=1, threads=4)
    rows = run_mse_sweep(cfg)
    curves[name] = {r.k: r.rmse for r in rows}
for k in show:
    print(f"{k:<7d}" + "".join(f"{curves[name][k]:12.4f}" for name in models))
