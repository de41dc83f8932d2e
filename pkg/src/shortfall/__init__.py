"""Generalised shortfall risk measures for heavy-tailed losses.

Three routes to the same quantity ``x_tau``: exact root finding, first- and
second-order tail expansions, and Weissman-type estimation from data.
"""
from .asymptotics import (ExpansionContext, expansion_context, first_order,
                          gen_expectile_expansion, lp_expansion, phi, phi_inverse,
                          second_order, second_order_terms)
from .config import ExperimentConfig, RiskConfig, load_toml, parse_config
from .errors import (AccuracyError, BracketError, CapabilityError, DivergenceError,
                     DomainError, NumericalError, ShortfallError)
from .estimation import (EstimationResult, SortedSample, hill, shortfall_estimate,
                         shortfall_sweep, weissman_quantile)
from .riskmodel import (GPD, Burr, Distortion, Frechet, HeavyTailModel, Pareto,
                        PowerUtility, RegVarProfile, RiskSpec, distortion_inverse,
                        expectile_spec, gen_expectile_spec, lp_spec, make_model, sample)
from .simulation import (ExpansionRow, MseRow, default_tau_grid, format_csv,
                         run_expansion_compare, run_mse_sweep, write_csv)
from .solver import SolveReport, distorted_mean, gap, h_minus, h_plus, solve_x_tau
from .specfun import beta_fn, delta0, gamma1_const, gamma2_const, log_beta, log_gamma

__version__ = "0.1.0"
