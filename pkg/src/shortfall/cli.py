"""Command-line interface: ``solve``, ``expand``, ``estimate``, ``simulate``.

Exit codes: 0 on success, 2 for invalid input or an inadmissible risk
specification, 3 when a numerical routine fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from .asymptotics import first_order, gen_expectile_expansion, lp_expansion
from .config import RiskConfig, load_toml, parse_config, ExperimentConfig
from .errors import CapabilityError, DomainError, NumericalError
from .estimation import SortedSample, shortfall_estimate
from .riskmodel import Distortion, model_from_config
from .simulation import (EXPANSION_HEADER, MSE_HEADER, default_tau_grid, format_csv,
                         run_expansion_compare, run_mse_sweep)
from .solver import solve_x_tau

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3

_MODEL_FLAGS = ("gamma", "theta", "rho", "scale")
_RISK_FLAGS = ("p", "q", "alpha1", "a1", "alpha2", "a2", "h1", "h2")


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default,
                        help="master seed for simulations")
    parser.add_argument("--threads", type=int, default=default,
                        help="worker threads (never changes the output)")
    parser.add_argument("--out", default=default, help="output file (default: stdout)")


def _model_risk_flags(parser):
    parser.add_argument("--config", help="TOML file with [model] and [risk] tables")
    g = parser.add_argument_group("model")
    g.add_argument("--model", help="pareto, gpd, frechet or burr")
    for name in _MODEL_FLAGS:
        g.add_argument(f"--{name}", type=float)
    r = parser.add_argument_group("risk")
    r.add_argument("--risk", help="expectile, lp, gen-expectile or custom")
    for name in ("p", "q", "alpha1", "a1", "alpha2", "a2"):
        r.add_argument(f"--{name}", type=float)
    r.add_argument("--h1", help="identity or tvar:<p>")
    r.add_argument("--h2", help="identity or tvar:<p>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortfall", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="exact x_tau by root finding (JSON line)")
    _model_risk_flags(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    _global_flags(p, suppress=True)

    p = sub.add_parser("expand", help="first/second-order approximations")
    _model_risk_flags(p)
    p.add_argument("--tau", type=float, action="append",
                   help="level (repeatable); default is the 40-point grid")
    p.add_argument("--order", type=int, choices=(1, 2), default=2,
                   help="2: comparison table against the exact value; "
                        "1: first-order values only, as JSON lines")
    _global_flags(p, suppress=True)

    p = sub.add_parser("estimate", help="estimate x_tau from a one-column CSV sample")
    p.add_argument("data", help="CSV file with one observation per line")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="utility index of u1 = u2")
    p.add_argument("--h1", default="identity", help="identity or tvar:<p>")
    _global_flags(p, suppress=True)

    p = sub.add_parser("simulate", help="run an experiment config, write CSV")
    p.add_argument("config", help="TOML experiment file")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--tau", type=float)
    _global_flags(p, suppress=True)
    return parser


def _sections(args):
    doc = load_toml(args.config) if args.config else {}
    unknown = set(doc) - {"model", "risk", "experiment"}
    if unknown:
        raise DomainError(f"unknown config section(s): {sorted(unknown)}")
    model = dict(doc.get("model", {}))
    risk = dict(doc.get("risk", {}))
    if args.model is not None:
        model["name"] = args.model
    for name in _MODEL_FLAGS:
        val = getattr(args, name)
        if val is not None:
            model[name] = val
    if args.risk is not None:
        risk["kind"] = args.risk
    for name in _RISK_FLAGS:
        val = getattr(args, name)
        if val is not None:
            risk[name] = val
    if "name" not in model:
        raise DomainError("--model is required (or a [model] table in --config)")
    if "gamma" not in model:
        raise DomainError("--gamma is required (or 'gamma' in the [model] table)")
    return model_from_config(model), RiskConfig.from_mapping(risk), doc.get("experiment", {})


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def cmd_solve(args) -> int:
    model, risk, _ = _sections(args)
    report = solve_x_tau(risk.spec(model), args.tau, tol=args.tol)
    out = {"tau": args.tau, **report.to_dict()}
    with _output(args.out) as fh:
        fh.write(_json(out) + "\n")
    return EXIT_OK


def _first_only(model, risk, tau):
    if risk.kind == "gen-expectile":
        return gen_expectile_expansion(model, risk.p, risk.q, tau, order=1)
    if risk.kind in ("lp", "expectile"):
        return lp_expansion(model, 2.0 if risk.kind == "expectile" else risk.p, tau, order=1)
    return first_order(risk.spec(model), tau)


def cmd_expand(args) -> int:
    model, risk, exp = _sections(args)
    taus = args.tau
    if taus is None and "taus" in exp:
        taus = [float(t) for t in exp["taus"]]
    taus = tuple(taus) if taus else default_tau_grid()
    with _output(args.out) as fh:
        if args.order == 1:
            for tau in taus:
                fh.write(_json({"tau": tau, "order": 1, "x": _first_only(model, risk, tau)}) + "\n")
        else:
            cfg = ExperimentConfig("expansion-compare", model, risk, taus=taus)
            fh.write(format_csv(run_expansion_compare(cfg), EXPANSION_HEADER))
    return EXIT_OK


def _read_column(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            cell = line.strip().split(",")[0].strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                if lineno == 1 and not values:
                    continue  # header row
                raise DomainError(f"{path}:{lineno}: not a number: {cell!r}") from None
    return np.asarray(values)


def cmd_estimate(args) -> int:
    data = SortedSample(_read_column(args.data))
    res = shortfall_estimate(data, args.k, args.tau, args.alpha, Distortion.parse(args.h1))
    out = {"gamma_hat": res.gamma_hat, "q_hat": res.q_hat, "x_hat": res.x_hat,
           "k": res.k, "n": res.n, "tau": res.tau, "admissible": res.admissible}
    with _output(args.out) as fh:
        fh.write(_json(out) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = parse_config(load_toml(args.config))
    cfg = cfg.with_overrides(n=args.n, N=args.N, tau=args.tau, master_seed=args.seed,
                             threads=args.threads, output=args.out)
    if cfg.kind == "expansion-compare":
        text = format_csv(run_expansion_compare(cfg), EXPANSION_HEADER)
    else:
        text = format_csv(run_mse_sweep(cfg), MSE_HEADER)
    with _output(cfg.output) as fh:
        fh.write(text)
    return EXIT_OK


_COMMANDS = {"solve": cmd_solve, "expand": cmd_expand,
             "estimate": cmd_estimate, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DomainError, CapabilityError, OSError) as exc:
        print(f"shortfall {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericalError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"shortfall {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
