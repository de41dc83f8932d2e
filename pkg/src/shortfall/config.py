"""Strict parsing of the ``[model]``, ``[risk]`` and ``[experiment]`` tables."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import DomainError
from .riskmodel import (Distortion, HeavyTailModel, PowerUtility, RiskSpec,
                        expectile_spec, gen_expectile_spec, lp_spec, model_from_config)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["RiskConfig", "ExperimentConfig", "load_toml", "parse_config"]

RISK_KINDS = ("expectile", "lp", "gen-expectile", "custom")
_RISK_KEYS = {
    "expectile": set(),
    "lp": {"p"},
    "gen-expectile": {"p", "q"},
    "custom": {"alpha1", "a1", "alpha2", "a2", "h1", "h2"},
}
EXPERIMENTS = ("expansion-compare", "mse-sweep")
_EXPERIMENT_KEYS = {"kind", "n", "N", "taus", "tau", "k_lo", "k_hi", "k_step",
                    "master_seed", "threads", "output"}


def _num(section, key, default=None):
    if key not in section:
        if default is None:
            raise DomainError(f"missing required key {key!r}")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise DomainError(f"{key!r} must be a number, got {val!r}")
    return float(val)


@dataclass(frozen=True)
class RiskConfig:
    """Which generalised shortfall to compute.

    ``kind`` is ``expectile``, ``lp`` (``p``), ``gen-expectile`` (``p``,
    ``q``) or ``custom`` (power utilities ``a_i x**alpha_i`` and distortion
    strings such as ``"identity"`` or ``"tvar:0.9"``).
    """

    kind: str = "expectile"
    p: float | None = None
    q: float | None = None
    alpha1: float = 1.0
    a1: float = 1.0
    alpha2: float = 1.0
    a2: float = 1.0
    h1: str = "identity"
    h2: str = "identity"

    @classmethod
    def from_mapping(cls, section: Mapping) -> "RiskConfig":
        section = dict(section)
        kind = str(section.pop("kind", "expectile"))
        if kind not in RISK_KINDS:
            raise DomainError(f"unknown risk kind {kind!r}; choose from {list(RISK_KINDS)}")
        unknown = set(section) - _RISK_KEYS[kind]
        if unknown:
            raise DomainError(f"unknown [risk] key(s) for {kind}: {sorted(unknown)}")
        if kind == "lp":
            return cls(kind, p=_num(section, "p"))
        if kind == "gen-expectile":
            return cls(kind, p=_num(section, "p"), q=_num(section, "q"))
        if kind == "custom":
            kw = {k: _num(section, k, 1.0) for k in ("alpha1", "a1", "alpha2", "a2")}
            for k in ("h1", "h2"):
                if k in section:
                    Distortion.parse(str(section[k]))
                    kw[k] = str(section[k])
            return cls(kind, **kw)
        return cls(kind)

    def spec(self, model: HeavyTailModel) -> RiskSpec:
        if self.kind == "expectile":
            return expectile_spec(model)
        if self.kind == "lp":
            return lp_spec(model, self.p)
        if self.kind == "gen-expectile":
            return gen_expectile_spec(model, self.p, self.q)
        return RiskSpec(model, PowerUtility(self.alpha1, self.a1), Distortion.parse(self.h1),
                        PowerUtility(self.alpha2, self.a2), Distortion.parse(self.h2))

    def estimator_args(self) -> tuple[float, Distortion]:
        """``(alpha, h1)`` for the sample estimator, which needs ``u1 = u2``."""
        if self.kind == "expectile":
            return 1.0, Distortion.identity()
        if self.kind == "lp":
            return self.p - 1.0, Distortion.identity()
        if self.kind == "gen-expectile":
            return 1.0, Distortion.tvar(self.p)
        if (self.alpha1, self.a1) != (self.alpha2, self.a2):
            raise DomainError("the sample estimator needs identical utilities u1 = u2")
        return self.alpha1, Distortion.parse(self.h1)


@dataclass(frozen=True)
class ExperimentConfig:
    """A simulation experiment.

    ``taus`` lists levels for expansion comparisons (``None`` means 40
    geometric points with ``1 - tau`` from 0.05 to 1e-4). ``tau`` is the
    estimation level of an rMSE sweep (``None`` means ``1 - 1/n``). The k
    grid defaults to ``n//50 .. 2n//3``.
    """

    kind: str
    model: HeavyTailModel
    risk: RiskConfig = field(default_factory=RiskConfig)
    n: int = 500
    N: int = 500
    taus: tuple[float, ...] | None = None
    tau: float | None = None
    k_lo: int | None = None
    k_hi: int | None = None
    k_step: int = 1
    master_seed: int = 0
    threads: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.kind!r}; choose from {list(EXPERIMENTS)}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if self.k_step < 1:
            raise DomainError(f"k_step must be >= 1, got {self.k_step}")
        if self.threads < 1:
            raise DomainError(f"threads must be >= 1, got {self.threads}")
        lo, hi = self.k_range
        if not (1 <= lo <= hi <= self.n - 1):
            raise DomainError(f"k grid [{lo}, {hi}] must lie within [1, {self.n - 1}]")

    @property
    def k_range(self) -> tuple[int, int]:
        lo = self.k_lo if self.k_lo is not None else max(1, self.n // 50)
        hi = self.k_hi if self.k_hi is not None else (2 * self.n) // 3
        return int(lo), int(hi)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DomainError(f"{path}: invalid TOML: {exc}") from None


def _int(section, key):
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise DomainError(f"{key!r} must be an integer, got {val!r}")
    return val


def parse_config(doc: Mapping) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a parsed TOML document."""
    unknown = set(doc) - {"model", "risk", "experiment"}
    if unknown:
        raise DomainError(f"unknown config section(s): {sorted(unknown)}")
    if "model" not in doc:
        raise DomainError("config needs a [model] section")
    model = model_from_config(doc["model"])
    risk = RiskConfig.from_mapping(doc.get("risk", {}))
    exp = dict(doc.get("experiment", {}))
    bad = set(exp) - _EXPERIMENT_KEYS
    if bad:
        raise DomainError(f"unknown [experiment] key(s): {sorted(bad)}")
    kw = {}
    for key in ("n", "N", "k_lo", "k_hi", "k_step", "master_seed", "threads"):
        if key in exp:
            kw[key] = _int(exp, key)
    if "taus" in exp:
        taus = exp["taus"]
        if not isinstance(taus, list) or not taus:
            raise DomainError("'taus' must be a non-empty list of levels")
        kw["taus"] = tuple(_num({"tau": t}, "tau") for t in taus)
    if "tau" in exp:
        kw["tau"] = _num(exp, "tau")
    if "output" in exp:
        kw["output"] = str(exp["output"])
    kind = str(exp.get("kind", "mse-sweep"))
    return ExperimentConfig(kind=kind, model=model, risk=risk, **kw)
