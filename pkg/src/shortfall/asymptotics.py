"""First- and second-order asymptotic expansions of ``x_tau`` as ``tau -> 1``.

The generic engine works for any admissible :class:`RiskSpec` whose
ingredients carry regular-variation metadata; auxiliary functions that are
identically zero simply remove their correction terms. Two closed-form
specialisations (L^p-quantiles and TVaR-distorted generalised expectiles)
are implemented separately so they can cross-check the engine.

All ``o(1)`` factors in the expansions are evaluated as zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, DivergenceError, DomainError
from .riskmodel import HeavyTailModel, RiskSpec
from .solver import distorted_mean
from .specfun import beta_fn, delta0, gamma1_const, gamma2_const

__all__ = [
    "ExpansionContext",
    "expansion_context",
    "phi",
    "phi_inverse",
    "first_order",
    "second_order",
    "second_order_terms",
    "lp_expansion",
    "gen_expectile_expansion",
]


@dataclass(frozen=True)
class ExpansionContext:
    """Derived constants of the first/second-order expansions.

    ``c``, ``b``, ``a1``, ``a2`` are the leading constants of ``U``,
    ``1 - h1(1 - 1/t)``, ``u1`` and ``u2``. Terms whose auxiliary function is
    identically zero have ``None`` in place of their index/constant.
    """

    gamma: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    s: float
    c: float
    b: float
    a1: float
    a2: float
    delta0: float
    delta1: float
    c_star: float
    c0: float
    EZ: float
    rho: float | None
    eta1: float | None
    eta2: float | None
    varsigma: float | None
    rho_h: float | None
    eta_star: float | None
    Gamma1: float | None
    Gamma2: float | None
    Delta2: float | None
    Delta3: float | None
    Delta4: float
    Delta5: float
    Delta6: float | None
    # auxiliary-function coefficients (aux(t) = coef * t**index)
    A_coef: float = 0.0
    B1_coef: float = 0.0
    B2_coef: float = 0.0
    C_coef: float = 0.0

    def A(self, t):
        return 0.0 if self.A_coef == 0.0 else self.A_coef * np.power(t, self.rho)

    def B1(self, x):
        return 0.0 if self.B1_coef == 0.0 else self.B1_coef * np.power(x, self.eta1)

    def B2(self, x):
        return 0.0 if self.B2_coef == 0.0 else self.B2_coef * np.power(x, self.eta2)

    def C(self, t):
        return 0.0 if self.C_coef == 0.0 else self.C_coef * np.power(t, self.varsigma)


def _aux_pair(profile):
    if profile.pure_power:
        return None, 0.0
    return profile.second_index, profile.aux_coef


@lru_cache(maxsize=256)
def expansion_context(spec: RiskSpec) -> ExpansionContext:
    """Assemble every constant needed by :func:`second_order`.

    Raises
    ------
    DivergenceError
        If the specification is inadmissible.
    CapabilityError
        If the distortion/tail auxiliary functions cancel (``kappa =
        -beta1/gamma``), if ``alpha2 < 1``, or if the combined auxiliary
        function ``A*`` degenerates.
    """
    if not spec.admissible:
        raise DivergenceError("inadmissible risk specification: "
                              + "; ".join(spec.admissibility_problems()))
    g = spec.gamma
    a1p, a2p = spec.u1.tail_profile, spec.u2.tail_profile
    hp, up = spec.h1.tail_profile, spec.model.tail_profile
    alpha1, alpha2 = a1p.index, a2p.index
    beta1, beta2 = spec.beta1, spec.beta2
    s = spec.s
    c, b, a1, a2 = up.const, hp.const, a1p.const, a2p.const

    if alpha2 < 1.0:
        raise CapabilityError("the second-order expansion needs alpha2 >= 1")

    rho, A_coef = _aux_pair(up)
    eta1, B1_coef = _aux_pair(a1p)
    eta2, B2_coef = _aux_pair(a2p)
    vs, C_coef = _aux_pair(hp)

    if rho is not None and vs is not None and rho == vs and A_coef != 0.0:
        kappa = C_coef / A_coef
        if math.isclose(kappa, -beta1 / g, rel_tol=1e-12):
            raise CapabilityError("C/A -> -beta1/gamma: the expansion needs third-order terms")

    present = [r for r in (rho, vs) if r is not None]
    rho_h = max(present) / g if present else None
    eta_cands = [e for e in (eta1, rho_h, eta2) if e is not None]
    eta_star = max(eta_cands) if eta_cands else None
    if eta1 is not None and alpha1 + eta1 <= 0:
        raise DomainError(f"need alpha1 + eta1 > 0, got {alpha1 + eta1}")

    d0 = delta0(g, alpha1, beta1)
    d1 = d0 ** (1.0 / s)
    c_star = (a2 / (b * c ** (beta1 / g) * a1)) ** (-1.0 / s)
    c0 = c_star * c ** (-1.0 / (g * s))
    EZ = distorted_mean(spec.model, spec.h2)

    G1 = gamma1_const(g, alpha1, beta1, eta1) if eta1 is not None else None
    G2 = gamma2_const(g, alpha1, beta1, rho_h) if rho_h is not None else None
    D2 = G1 * c0 ** eta1 * d0 ** (eta1 / s - 1.0) / s if G1 is not None else None
    D3 = G2 * c0 ** rho_h * d0 ** (rho_h / s - 1.0) / s if G2 is not None else None
    D4 = c0 ** (-beta2 / g) * d0 ** (-beta2 / (g * s)) / s
    D5 = alpha2 * EZ * d0 ** (-1.0 / s) / (s * c0)
    D6 = c0 ** eta_star * d0 ** (eta_star / s) / s if eta_star is not None else None

    ctx = ExpansionContext(
        gamma=g, alpha1=alpha1, alpha2=alpha2, beta1=beta1, beta2=beta2, s=s,
        c=c, b=b, a1=a1, a2=a2, delta0=d0, delta1=d1, c_star=c_star, c0=c0, EZ=EZ,
        rho=rho, eta1=eta1, eta2=eta2, varsigma=vs, rho_h=rho_h, eta_star=eta_star,
        Gamma1=G1, Gamma2=G2, Delta2=D2, Delta3=D3, Delta4=D4, Delta5=D5, Delta6=D6,
        A_coef=A_coef, B1_coef=B1_coef, B2_coef=B2_coef, C_coef=C_coef,
    )
    # A* must not vanish identically when two or more pieces feed it
    if sum(x is not None for x in (eta1, rho_h, eta2)) >= 2:
        t = 1e8
        parts = [abs(v) for v in _a_star_parts(ctx, spec.model, t)]
        if abs(sum(_a_star_parts(ctx, spec.model, t))) <= 1e-10 * max(parts):
            raise CapabilityError("degenerate combined auxiliary function A*")
    return ctx


def _A_h(ctx: ExpansionContext, model: HeavyTailModel, x):
    if ctx.rho_h is None:
        return 0.0
    t = 1.0 / model.sf(x)
    return ((ctx.beta1 / ctx.gamma) * ctx.A(t) + ctx.C(t)) / ctx.gamma


def _a_star_parts(ctx, model, x):
    parts = []
    if ctx.eta2 is not None:
        parts.append(ctx.B2(x) / ctx.eta2)
    if ctx.eta1 is not None:
        parts.append(-ctx.B1(x) / ctx.eta1)
    if ctx.rho_h is not None:
        parts.append(-_A_h(ctx, model, x) / ctx.rho_h)
    return parts


def _check_tau(tau):
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau}")


def phi(spec: RiskSpec, x):
    """``u2(x) / (u1(x) (1 - h1(F(x))))``."""
    x = np.asarray(x, dtype=float)
    tail = spec.h1.dual(spec.model.sf(x))
    return (spec.u2(x) / (spec.u1(x) * tail))[()]


def phi_inverse(spec: RiskSpec, q: float) -> float:
    """``inf{x : phi(x) >= q}``.

    Closed form when ``alpha1 == alpha2`` (``phi`` is then a constant times
    ``1 / (1 - h1(F))``); otherwise geometric bisection above the median.
    """
    u1, u2 = spec.u1, spec.u2
    if u1.alpha == u2.alpha:
        ratio = u2.a / u1.a
        target = ratio / q  # value of 1 - h1(F(x))
        if not (0.0 < target < 1.0):
            raise DomainError(f"phi_inverse: q={q} is below the range of phi")
        return float(spec.model.isf(target * spec.h1.active_survival))
    if spec.s <= 0:
        raise DomainError("phi does not diverge when s <= 0")
    lo = float(spec.model.ppf(0.5))
    if phi(spec, lo) >= q:
        raise DomainError(f"phi_inverse: q={q} is below the increasing range of phi")
    hi = 2.0 * lo
    while phi(spec, hi) < q:
        lo, hi = hi, 2.0 * hi
        if not math.isfinite(hi):
            raise DomainError(f"phi_inverse: could not bracket q={q}")
    while hi - lo > 1e-14 * hi:
        mid = 0.5 * (lo + hi)
        if phi(spec, mid) >= q:
            hi = mid
        else:
            lo = mid
    return hi


def first_order(spec: RiskSpec, tau: float) -> float:
    """``Delta1 * phi_inverse(1 / (1 - tau))``."""
    _check_tau(tau)
    if not spec.admissible:
        raise DivergenceError("inadmissible risk specification: "
                              + "; ".join(spec.admissibility_problems()))
    d0 = delta0(spec.gamma, spec.alpha1, spec.beta1)
    return d0 ** (1.0 / spec.s) * phi_inverse(spec, 1.0 / (1.0 - tau))


def second_order_terms(spec: RiskSpec, tau: float) -> dict:
    """Individual relative corrections of the second-order expansion.

    Keys: ``B1``, ``A_h``, ``h2``, ``mean``, ``A_star``, ``A``, ``level``;
    plus ``base`` (``c0 * Delta1 * F^{-1}(tau)**(1/(gamma s))``). Absent
    auxiliary functions contribute exactly zero.
    """
    _check_tau(tau)
    ctx = expansion_context(spec)
    model = spec.model
    g, s = ctx.gamma, ctx.s
    Q = float(model.ppf(tau))
    Qp = Q ** (1.0 / (g * s))
    terms = {"base": ctx.c0 * ctx.delta1 * Qp}
    terms["B1"] = ctx.Delta2 * ctx.B1(Qp) if ctx.Delta2 is not None else 0.0
    terms["A_h"] = ctx.Delta3 * _A_h(ctx, model, Qp) if ctx.Delta3 is not None else 0.0
    terms["h2"] = ctx.Delta4 * float(spec.h2.dual(model.sf(Qp)))
    terms["mean"] = ctx.Delta5 / Qp
    terms["A_star"] = (-ctx.Delta6 * sum(_a_star_parts(ctx, model, Qp))
                       if ctx.Delta6 is not None else 0.0)
    terms["A"] = (-ctx.A(1.0 / (1.0 - tau)) / (g * s * ctx.rho)
                  if ctx.rho is not None else 0.0)
    terms["level"] = -(1.0 - tau) / s
    return {k: float(v) for k, v in terms.items()}


def second_order(spec: RiskSpec, tau: float) -> float:
    """Second-order approximation of ``x_tau`` in terms of ``F^{-1}(tau)``."""
    terms = second_order_terms(spec, tau)
    base = terms.pop("base")
    return base * (1.0 + math.fsum(terms.values()))


def _A_at(model: HeavyTailModel, t):
    prof = model.tail_profile
    if prof.pure_power:
        return 0.0, None
    return float(prof.aux(t)), prof.second_index


def lp_expansion(model: HeavyTailModel, p: float, tau: float, order: int = 2,
                 level_terms: bool = True) -> float:
    """Closed-form expansion of the L^p-quantile (``u = p x**(p-1)``,
    identity distortions).

    ``level_terms`` keeps the ``(1 - tau)`` correction, which is of smaller
    order than ``1/F^{-1}(tau)`` and is often dropped.
    """
    _check_tau(tau)
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    g = model.gamma
    if p < 1 or (p > 1 and g >= 1.0 / (p - 1.0)):
        raise DivergenceError(f"L^p-quantile needs gamma < 1/(p-1); got gamma={g}, p={p}")
    if order == 2 and p < 2:
        raise CapabilityError("second-order L^p expansion requires p >= 2")
    k = beta_fn(1.0 / g - p + 1.0, p) / g
    d1 = k ** g
    Q = float(model.ppf(tau))
    first = d1 * Q
    if order == 1:
        return first
    corr = g * (p - 1.0) * model.mean() / (d1 * Q)
    if level_terms:
        corr += g * (1.0 / k - 1.0) * (1.0 - tau)
    A_val, rho = _A_at(model, 1.0 / (1.0 - tau))
    if rho is not None:
        bracket = (1.0 - rho) * beta_fn((1.0 - rho) / g - p + 1.0, p) - beta_fn(1.0 / g - p + 1.0, p)
        coef = (bracket * k ** (rho - 1.0) / g + k ** rho - 1.0) / rho
        corr += coef * A_val
    return first * (1.0 + corr)


def gen_expectile_expansion(model: HeavyTailModel, p: float, q: float, tau: float,
                            order: int = 2, level_terms: bool = True) -> float:
    """Closed-form expansion of the TVaR generalised expectile
    (``u = 2x``, ``h1 = TVaR(p)``, ``h2 = TVaR(q)``).

    With ``level_terms=False`` the ``(1 - tau)`` contributions are dropped,
    leaving only the ``1/F^{-1}(tau)`` and ``A`` corrections.
    """
    _check_tau(tau)
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    if not (0.0 <= p <= q < 1.0):
        raise DomainError(f"need 0 <= p <= q < 1, got p={p}, q={q}")
    g = model.gamma
    if g >= 1:
        raise DivergenceError(f"generalised expectile needs gamma < 1, got {g}")
    r = 1.0 / g - 1.0
    d1 = r ** (-g)
    Q = float(model.ppf(tau))
    first = d1 * (1.0 - p) ** (-g) * Q
    if order == 1:
        return first
    corr = (1.0 - p) ** g * g * r ** g * model.tail_mean(q) / Q
    if level_terms:
        corr += (1.0 - g) * (1.0 - p) * min((1.0 - tau) / (1.0 - q), 1.0) - g * (1.0 - tau)
    A_val, rho = _A_at(model, 1.0 / (1.0 - tau))
    if rho is not None:
        coef = ((1.0 - p) ** (-rho) * (r ** (-rho) / (1.0 - g - rho) + (r ** (-rho) - 1.0) / rho)
                + ((1.0 - p) ** (-rho) - 1.0) / rho)
        corr += coef * A_val
    return first * (1.0 + corr)
