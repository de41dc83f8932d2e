"""Exact evaluation of the generalised shortfall risk measure.

Both sides of the defining equation are integrated in probability space
(``dh(F(y))`` becomes ``dh(s)``), then the root of
``G(x) = tau H1(x) - (1 - tau) H2(x)`` is bracketed and refined with
Brent's method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DivergenceError, DomainError, NumericalError
from .riskmodel import Distortion, HeavyTailModel, RiskSpec

__all__ = ["SolveReport", "h_plus", "h_minus", "gap", "solve_x_tau", "distorted_mean"]

DEFAULT_TOL = 1e-9
_QUAD_EPSREL = 1e-13
_MAX_DOUBLINGS = 200
_RTOL_FLOOR = 4.0 * float(np.finfo(float).eps)


@dataclass(frozen=True)
class SolveReport:
    x_tau: float
    residual: float
    relative_residual: float
    iterations: int
    bracket: tuple[float, float]
    quadrature_error_estimate: float

    def to_dict(self) -> dict:
        return {
            "x_tau": self.x_tau,
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "quadrature_error_estimate": self.quadrature_error_estimate,
        }


def _require_admissible(spec: RiskSpec):
    if not spec.admissible:
        raise DivergenceError("inadmissible risk specification: "
                              + "; ".join(spec.admissibility_problems()))


def _h_plus(spec, x):
    v_top = min(float(spec.model.sf(x)), spec.h1.active_survival)
    u1 = spec.u1
    val, err = spec.model.integrate_over_survival(
        lambda y, v: u1(y - x), 0.0, v_top, epsrel=_QUAD_EPSREL)
    d = spec.h1.density
    return d * val, d * err


def _h_minus(spec, x):
    v_bot = float(spec.model.sf(x))
    v_top = spec.h2.active_survival
    if v_bot >= v_top:
        return 0.0, 0.0
    u2 = spec.u2
    val, err = spec.model.integrate_over_survival(
        lambda y, v: u2(x - y), v_bot, v_top, epsrel=_QUAD_EPSREL)
    d = spec.h2.density
    return d * val, d * err


def h_plus(spec: RiskSpec, x: float) -> float:
    """``H_{u1,h1}((X - x)_+) = int_x^inf u1(y - x) dh1(F(y))``."""
    _require_admissible(spec)
    return _h_plus(spec, float(x))[0]


def h_minus(spec: RiskSpec, x: float) -> float:
    """``H_{u2,h2}((X - x)_-) = int_{-inf}^x u2(x - y) dh2(F(y))``."""
    _require_admissible(spec)
    return _h_minus(spec, float(x))[0]


def gap(spec: RiskSpec, tau: float, x: float) -> float:
    """``G(x) = tau H1(x) - (1 - tau) H2(x)``; strictly decreasing in ``x``."""
    _require_admissible(spec)
    return tau * _h_plus(spec, float(x))[0] - (1.0 - tau) * _h_minus(spec, float(x))[0]


def distorted_mean(model: HeavyTailModel, h: Distortion) -> float:
    """``E[Z] = int z dh(F(z))``, the mean of ``Z ~ h(F)``."""
    val, _ = model.integrate_over_survival(lambda y, v: y, 0.0, h.active_survival,
                                           epsrel=_QUAD_EPSREL)
    return h.density * val


def solve_x_tau(spec: RiskSpec, tau: float, tol: float = DEFAULT_TOL) -> SolveReport:
    """Solve ``tau H1(x) = (1 - tau) H2(x)`` for ``x``.

    The bracket grows geometrically around the quantile ``F^{-1}(tau)``
    until ``G`` changes sign; Brent's method then refines it to a width of
    about ``tol * max(1, |x|)``.

    Raises
    ------
    DivergenceError
        If the specification is inadmissible.
    BracketError
        If no sign change is found within 200 doublings.
    """
    _require_admissible(spec)
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    quad_err = [0.0]

    def G(x):
        p, ep = _h_plus(spec, x)
        m, em = _h_minus(spec, x)
        quad_err[0] = tau * ep + (1.0 - tau) * em
        return tau * p - (1.0 - tau) * m

    x0 = float(spec.model.ppf(tau))
    step = max(abs(x0), spec.model.scale, 1e-3)
    g0 = G(x0)
    if g0 == 0.0:
        lo = hi = x0
    elif g0 > 0:
        lo, hi = x0, x0 + step
        for _ in range(_MAX_DOUBLINGS):
            if G(hi) < 0:
                break
            lo, step = hi, 2.0 * step
            hi = x0 + step
        else:
            raise BracketError(f"no sign change above x={x0} after {_MAX_DOUBLINGS} doublings")
    else:
        lo, hi = x0 - step, x0
        for _ in range(_MAX_DOUBLINGS):
            if G(lo) > 0:
                break
            hi, step = lo, 2.0 * step
            lo = x0 - step
        else:
            raise BracketError(f"no sign change below x={x0} after {_MAX_DOUBLINGS} doublings")

    if lo == hi:
        root, iterations = lo, 0
    else:
        try:
            root, info = brentq(G, lo, hi, xtol=tol * 1e-3, rtol=max(tol, _RTOL_FLOOR),
                                maxiter=500, full_output=True)
        except RuntimeError as exc:
            raise NumericalError(f"root refinement failed on [{lo}, {hi}]: {exc}") from None
        iterations = info.iterations

    p, ep = _h_plus(spec, root)
    m, em = _h_minus(spec, root)
    # unbounded support: the shortfall side never vanishes
    if not p > 0.0:
        raise NumericalError(f"shortfall integral underflowed at x={root}")
    residual = tau * p - (1.0 - tau) * m
    scale = tau * p + (1.0 - tau) * m
    return SolveReport(
        x_tau=float(root),
        residual=float(residual),
        relative_residual=float(residual / scale) if scale > 0 else math.inf,
        iterations=int(iterations),
        bracket=(float(lo), float(hi)),
        quadrature_error_estimate=float(tau * ep + (1.0 - tau) * em),
    )
