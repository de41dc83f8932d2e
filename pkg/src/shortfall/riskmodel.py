"""Heavy-tailed distributions, distortions and utilities with their
regular-variation metadata, and the :class:`RiskSpec` built from them.

Every catalogue object carries a :class:`RegVarProfile` describing the
relevant tail function in power form ``const * t**index * (1 + aux(t)/second_index)``
where ``aux(t) = aux_coef * t**second_index``. ``aux_coef == 0`` means the
object is an exact power and its auxiliary function is identically zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError
from .quadrature import integrate

__all__ = [
    "RegVarProfile",
    "HeavyTailModel",
    "Pareto",
    "GPD",
    "Frechet",
    "Burr",
    "Distortion",
    "PowerUtility",
    "RiskSpec",
    "make_model",
    "model_from_config",
    "sample",
    "rng_for",
    "distortion_inverse",
    "expectile_spec",
    "lp_spec",
    "gen_expectile_spec",
]


@dataclass(frozen=True)
class RegVarProfile:
    """First/second-order regular variation data of one tail function.

    Attributes
    ----------
    index : float
        First-order index.
    second_index : float or None
        Second-order index (``<= 0``). ``None`` for exact powers.
    aux_coef : float
        ``aux(t) = aux_coef * t**second_index``; zero for exact powers.
    const : float
        Leading constant of the power representation.
    """

    index: float
    second_index: float | None = None
    aux_coef: float = 0.0
    const: float = 1.0

    def __post_init__(self):
        if self.second_index is not None and self.second_index > 0:
            raise DomainError(f"second-order index must be <= 0, got {self.second_index}")
        if self.aux_coef != 0.0 and self.second_index is None:
            raise DomainError("a nonzero auxiliary function needs a second-order index")

    @property
    def pure_power(self) -> bool:
        return self.aux_coef == 0.0

    def aux(self, t):
        if self.pure_power:
            return np.zeros_like(np.asarray(t, dtype=float)) + 0.0
        return self.aux_coef * np.power(t, self.second_index)


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class HeavyTailModel:
    """Base class. Subclasses implement ``sf``, ``cdf``, ``ppf`` and ``isf``
    for the unit-scale variable; ``scale`` multiplies the variable."""

    gamma: float
    scale: float = 1.0
    name: str = field(default="", init=False)

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be positive, got {self.scale}")

    # unit-scale hooks
    def _sf(self, x):
        raise NotImplementedError

    def _cdf(self, x):
        raise NotImplementedError

    def _isf(self, v):
        raise NotImplementedError

    def _ppf(self, s):
        raise NotImplementedError

    left_endpoint_unit = 0.0

    @property
    def left_endpoint(self) -> float:
        return self.left_endpoint_unit * self.scale

    def sf(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        out = np.where(x > self.left_endpoint_unit,
                       self._sf(np.maximum(x, self.left_endpoint_unit)), 1.0)
        return out[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        out = np.where(x > self.left_endpoint_unit,
                       self._cdf(np.maximum(x, self.left_endpoint_unit)), 0.0)
        return out[()]

    def isf(self, v):
        """Inverse survival function: ``x`` with ``sf(x) = v``, ``v in [0, 1]``."""
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = self.scale * self._isf(v)
        return out[()]

    def ppf(self, s):
        """Quantile function ``F^{-1}(s)``."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = self.scale * self._ppf(s)
        return out[()]

    def tail_quantile(self, t):
        """``U(t) = F^{-1}(1 - 1/t)`` for ``t >= 1``."""
        return self.isf(1.0 / np.asarray(t, dtype=float))

    @property
    def tail_profile(self) -> RegVarProfile:
        raise NotImplementedError

    def params(self) -> dict:
        out = {"name": self.name, "gamma": self.gamma}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out

    def scaled(self, factor: float) -> "HeavyTailModel":
        kw = {k: v for k, v in self.params().items() if k != "name"}
        kw["scale"] = self.scale * factor
        return type(self)(**kw)

    def integrate_over_survival(self, func, v_lo, v_hi, epsrel=1e-12, limit=100):
        """``int_{v_lo}^{v_hi} func(isf(v), v) dv`` with ``0 <= v_lo <= v_hi <= 1``.

        The part ``v <= 1/2`` is integrated in ``w = -log v`` (so the upper
        tail becomes an exponentially decaying integrand on a half line), the
        rest in ``s = 1 - v`` through the quantile function. Returns
        ``(value, error)``.
        """
        if v_hi <= v_lo:
            return 0.0, 0.0
        split = 0.5
        value = err = 0.0
        if v_hi > split:
            s_hi = 1.0 - max(v_lo, split)
            s_lo = 1.0 - v_hi

            def fs(s):
                return func(self.ppf(s), 1.0 - s)

            r = integrate(fs, s_lo, s_hi, epsrel=epsrel, limit=limit)
            value += r.value
            err += r.error
        if v_lo < split:
            w_lo = -math.log(min(v_hi, split))
            w_hi = math.inf if v_lo == 0.0 else -math.log(v_lo)

            def fw(w):
                v = np.exp(-w)
                out = np.zeros_like(v)
                live = v > 0
                if np.any(live):
                    vl = v[live]
                    vals = func(self.isf(vl), vl) * vl
                    # deep-tail overflow of an integrand that tends to zero
                    vals[~np.isfinite(vals) & (vl < 1e-100)] = 0.0
                    out[live] = vals
                return out

            r = integrate(fw, w_lo, w_hi, epsrel=epsrel, limit=limit)
            value += r.value
            err += r.error
        return value, err

    def mean(self) -> float:
        return self.tail_mean(0.0)

    def tail_mean(self, q: float) -> float:
        """``E[X | X > F^{-1}(q)]`` for ``q in [0, 1)``."""
        if self.gamma >= 1:
            raise DomainError("the mean is infinite for gamma >= 1")
        v_hi = 1.0 - q
        val, _ = self.integrate_over_survival(lambda y, v: y, 0.0, v_hi)
        return val / v_hi


@dataclass(frozen=True)
class Pareto(HeavyTailModel):
    """``F(x) = 1 - x**(-1/gamma)``, ``x > 1``."""

    name: str = field(default="pareto", init=False)
    left_endpoint_unit = 1.0

    def _sf(self, x):
        return np.power(x, -1.0 / self.gamma)

    def _cdf(self, x):
        return -np.expm1(-np.log(x) / self.gamma)

    def _isf(self, v):
        return np.power(v, -self.gamma)

    def _ppf(self, s):
        return np.exp(-self.gamma * np.log1p(-s))

    @property
    def tail_profile(self):
        return RegVarProfile(self.gamma, None, 0.0, self.scale)

    def tail_mean(self, q):
        if self.gamma >= 1:
            raise DomainError("the mean is infinite for gamma >= 1")
        t = max(float(self.ppf(q)), self.left_endpoint)
        return t / (1.0 - self.gamma)


@dataclass(frozen=True)
class GPD(HeavyTailModel):
    """``F(x) = 1 - (theta/(x + theta))**(1/gamma)``, ``x > 0``.

    ``U(t) = theta (t**gamma - 1)``, second-order index ``-gamma`` with
    ``A(t) = gamma t**(-gamma)``.
    """

    theta: float = 1.0
    name: str = field(default="gpd", init=False)

    def __post_init__(self):
        super().__post_init__()
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise DomainError(f"theta must be positive, got {self.theta}")

    def _sf(self, x):
        return np.power(self.theta / (x + self.theta), 1.0 / self.gamma)

    def _cdf(self, x):
        return -np.expm1(-np.log1p(x / self.theta) / self.gamma)

    def _isf(self, v):
        return self.theta * np.expm1(-self.gamma * np.log(v))

    def _ppf(self, s):
        return self.theta * np.expm1(-self.gamma * np.log1p(-s))

    @property
    def tail_profile(self):
        return RegVarProfile(self.gamma, -self.gamma, self.gamma,
                             self.theta * self.scale)

    def params(self):
        out = super().params()
        out["theta"] = self.theta
        return out

    def tail_mean(self, q):
        # mean excess over t is gamma (theta + t) / (1 - gamma)
        if self.gamma >= 1:
            raise DomainError("the mean is infinite for gamma >= 1")
        t = float(self._ppf(q))
        return self.scale * (t + self.gamma * self.theta) / (1.0 - self.gamma)


@dataclass(frozen=True)
class Frechet(HeavyTailModel):
    """``F(x) = exp(-x**(-1/gamma))``, ``x > 0``.

    ``U(t) = (-log(1 - 1/t))**(-gamma)``. Expanding
    ``-log(1 - 1/t) = t**-1 (1 + 1/(2t) + O(t**-2))`` gives
    ``U(t) = t**gamma (1 - gamma/(2t) + O(t**-2))``, i.e. second-order index
    ``-1`` and ``A(t) = gamma / (2t)`` (one representative of its
    asymptotic-equivalence class).
    """

    name: str = field(default="frechet", init=False)

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            return -np.expm1(-np.power(x, -1.0 / self.gamma))

    def _cdf(self, x):
        with np.errstate(divide="ignore"):
            return np.exp(-np.power(x, -1.0 / self.gamma))

    def _isf(self, v):
        return np.power(-np.log1p(-v), -self.gamma)

    def _ppf(self, s):
        return np.power(-np.log(s), -self.gamma)

    @property
    def tail_profile(self):
        return RegVarProfile(self.gamma, -1.0, 0.5 * self.gamma, self.scale)

    def mean(self):
        if self.gamma >= 1:
            raise DomainError("the mean is infinite for gamma >= 1")
        return self.scale * math.gamma(1.0 - self.gamma)


@dataclass(frozen=True)
class Burr(HeavyTailModel):
    """``F(x) = 1 - (1 + x**(-rho/gamma))**(1/rho)``, ``x > 0``, ``rho < 0``.

    ``U(t) = (t**(-rho) - 1)**(-gamma/rho)``, second-order index ``rho`` and
    ``A(t) = gamma t**rho``.
    """

    rho: float = -1.0
    name: str = field(default="burr", init=False)

    def __post_init__(self):
        super().__post_init__()
        if not (self.rho < 0 and math.isfinite(self.rho)):
            raise DomainError(f"Burr rho must be negative, got {self.rho}")

    def _sf(self, x):
        return np.exp(np.log1p(np.power(x, -self.rho / self.gamma)) / self.rho)

    def _cdf(self, x):
        return -np.expm1(np.log1p(np.power(x, -self.rho / self.gamma)) / self.rho)

    def _isf(self, v):
        # v**-gamma * (1 - v**-rho)**(-gamma/rho): no overflow as v -> 0
        lv = np.log(v)
        return np.exp(-self.gamma * lv) * np.power(-np.expm1(-self.rho * lv),
                                                     -self.gamma / self.rho)

    def _ppf(self, s):
        return np.power(np.expm1(self.rho * np.log1p(-s)), -self.gamma / self.rho)

    @property
    def tail_profile(self):
        return RegVarProfile(self.gamma, self.rho, self.gamma, self.scale)

    def params(self):
        out = super().params()
        out["rho"] = self.rho
        return out


_MODELS = {"pareto": Pareto, "gpd": GPD, "frechet": Frechet, "burr": Burr}
_MODEL_KEYS = {
    "pareto": {"gamma", "scale"},
    "gpd": {"gamma", "theta", "scale"},
    "frechet": {"gamma", "scale"},
    "burr": {"gamma", "rho", "scale"},
}


def make_model(name: str, **params) -> HeavyTailModel:
    """Build a catalogue distribution by name (``pareto``, ``gpd``,
    ``frechet``, ``burr``)."""
    key = name.lower()
    if key not in _MODELS:
        raise DomainError(f"unknown model {name!r}; choose from {sorted(_MODELS)}")
    unknown = set(params) - _MODEL_KEYS[key]
    if unknown:
        raise DomainError(f"unknown parameter(s) for {key}: {sorted(unknown)}")
    if "gamma" not in params:
        raise DomainError(f"model {key} requires 'gamma'")
    if key == "burr" and "rho" not in params:
        raise DomainError("model burr requires 'rho'")
    try:
        kw = {k: float(v) for k, v in params.items()}
    except (TypeError, ValueError) as exc:
        raise DomainError(f"model parameters must be numbers: {exc}") from None
    return _MODELS[key](**kw)


def model_from_config(section: Mapping) -> HeavyTailModel:
    """Model from a ``[model]`` config table: ``name`` plus parameters."""
    section = dict(section)
    if "name" not in section:
        raise DomainError("[model] section requires 'name'")
    name = section.pop("name")
    return make_model(str(name), **section)


# ---------------------------------------------------------------------------
# sampling


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``(seed, stream)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def sample(model: HeavyTailModel, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """``n`` i.i.d. draws by inverse transform of Philox uniforms."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    u = 1.0 - rng_for(seed, stream).random(n)  # in (0, 1]
    return np.asarray(model.isf(u), dtype=float)


# ---------------------------------------------------------------------------
# distortions and utilities


@dataclass(frozen=True)
class Distortion:
    """``h(x) = (x - p)_+ / (1 - p)``; ``p = 0`` is the identity."""

    p: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p < 1.0):
            raise DomainError(f"TVaR level must lie in [0, 1), got {self.p}")

    @classmethod
    def identity(cls):
        return cls(0.0)

    @classmethod
    def tvar(cls, p: float):
        return cls(float(p))

    @property
    def kind(self) -> str:
        return "identity" if self.p == 0.0 else "tvar"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.p) / (1.0 - self.p), 0.0, 1.0)[()]

    def dual(self, v):
        """``1 - h(1 - v)``."""
        return np.minimum(np.asarray(v, dtype=float) / (1.0 - self.p), 1.0)[()]

    @property
    def active_survival(self) -> float:
        """Largest survival probability carrying distortion mass."""
        return 1.0 - self.p

    @property
    def density(self) -> float:
        """``h'(s)`` on the active range (constant for this family)."""
        return 1.0 / (1.0 - self.p)

    def inverse(self, tau: float) -> float:
        if not (0.0 < tau < 1.0):
            raise DomainError(f"distortion inverse needs tau in (0, 1), got {tau}")
        return self.p + (1.0 - self.p) * tau

    @property
    def tail_profile(self) -> RegVarProfile:
        # 1 - h(1 - 1/t) = t**-1 / (1 - p) once t >= 1/(1 - p)
        return RegVarProfile(-1.0, None, 0.0, 1.0 / (1.0 - self.p))

    def label(self) -> str:
        return "identity" if self.kind == "identity" else f"tvar:{self.p:g}"

    @classmethod
    def parse(cls, text: str) -> "Distortion":
        """``identity`` or ``tvar:<p>``."""
        t = str(text).strip().lower()
        if t == "identity":
            return cls.identity()
        if t.startswith("tvar:"):
            try:
                return cls.tvar(float(t[5:]))
            except ValueError:
                pass
        raise DomainError(f"cannot parse distortion {text!r}; use 'identity' or 'tvar:<p>'")


def distortion_inverse(h: Distortion, tau: float) -> float:
    return h.inverse(tau)


@dataclass(frozen=True)
class PowerUtility:
    """``u(x) = a x**alpha`` on ``[0, inf)``."""

    alpha: float
    a: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.a > 0):
            raise DomainError(f"power utility needs alpha, a > 0, got {self.alpha}, {self.a}")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return (self.a * np.power(np.maximum(y, 0.0), self.alpha))[()]

    def derivative(self, y):
        y = np.asarray(y, dtype=float)
        return (self.a * self.alpha * np.power(np.maximum(y, 0.0), self.alpha - 1.0))[()]

    @property
    def tail_profile(self) -> RegVarProfile:
        return RegVarProfile(self.alpha, None, 0.0, self.a)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RiskSpec:
    """The quadruple ``(u1, h1, u2, h2)`` together with the model ``X``."""

    model: HeavyTailModel
    u1: PowerUtility
    h1: Distortion
    u2: PowerUtility
    h2: Distortion

    @property
    def gamma(self) -> float:
        return self.model.gamma

    @property
    def alpha1(self) -> float:
        return self.u1.alpha

    @property
    def alpha2(self) -> float:
        return self.u2.alpha

    @property
    def beta1(self) -> float:
        return -self.h1.tail_profile.index

    @property
    def beta2(self) -> float:
        return -self.h2.tail_profile.index

    @property
    def s(self) -> float:
        return self.alpha2 - self.alpha1 + self.beta1 / self.gamma

    @property
    def shortfall_finite(self) -> bool:
        return self.beta1 / self.gamma > self.alpha1

    @property
    def moment_finite(self) -> bool:
        # all catalogue models are bounded below; only the right tail matters
        return self.beta2 / self.gamma > self.alpha2

    @property
    def admissible(self) -> bool:
        return self.s > 0 and self.shortfall_finite and self.moment_finite

    def admissibility_problems(self) -> list[str]:
        out = []
        if not self.shortfall_finite:
            out.append(f"beta1/gamma = {self.beta1 / self.gamma:.6g} <= alpha1 = {self.alpha1:.6g}")
        if not self.moment_finite:
            out.append(f"beta2/gamma = {self.beta2 / self.gamma:.6g} <= alpha2 = {self.alpha2:.6g}")
        if not self.s > 0:
            out.append(f"s = {self.s:.6g} <= 0")
        return out

    def with_model(self, model: HeavyTailModel) -> "RiskSpec":
        return RiskSpec(model, self.u1, self.h1, self.u2, self.h2)


def expectile_spec(model: HeavyTailModel) -> RiskSpec:
    u = PowerUtility(1.0)
    h = Distortion.identity()
    return RiskSpec(model, u, h, u, h)


def lp_spec(model: HeavyTailModel, p: float) -> RiskSpec:
    """L^p-quantile: ``u1 = u2 = p x**(p-1)``, identity distortions."""
    if p <= 1:
        raise DomainError(f"L^p exponent must exceed 1, got {p}")
    u = PowerUtility(p - 1.0, p)
    h = Distortion.identity()
    return RiskSpec(model, u, h, u, h)


def gen_expectile_spec(model: HeavyTailModel, p: float, q: float) -> RiskSpec:
    """Coherent generalised expectile: ``u = 2x``, ``h1 = TVaR(p)``, ``h2 = TVaR(q)``."""
    if p > q:
        raise DomainError(f"generalised expectile needs p <= q, got p={p}, q={q}")
    u = PowerUtility(1.0, 2.0)
    return RiskSpec(model, u, Distortion.tvar(p), u, Distortion.tvar(q))
