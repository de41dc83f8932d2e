"""Tail-index and extreme-level estimation from an i.i.d. sample.

Order statistics are 1-based: ``X_{1,n} <= ... <= X_{n,n}``, so the
threshold ``X_{n-k,n}`` is ``values[n - k - 1]`` in 0-based storage.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .riskmodel import Distortion, distortion_inverse
from .specfun import log_beta

__all__ = [
    "SortedSample",
    "EstimationResult",
    "hill",
    "weissman_quantile",
    "shortfall_estimate",
    "shortfall_sweep",
]


class SortedSample:
    """Immutable ascending copy of a sample with cached tail log-sums.

    Parameters
    ----------
    data : array_like
        Raw observations; sorted once on construction.
    """

    __slots__ = ("values", "n", "_logs", "_cumlog")

    def __init__(self, data):
        values = np.sort(np.asarray(data, dtype=float).ravel())
        if values.size < 2:
            raise DomainError("need at least two observations")
        if not np.all(np.isfinite(values)):
            raise DomainError("sample contains non-finite values")
        values.setflags(write=False)
        self.values = values
        self.n = int(values.size)
        self._logs = None
        self._cumlog = None

    def order_stat(self, i: int) -> float:
        """``X_{i,n}``, 1-based."""
        if not (1 <= i <= self.n):
            raise DomainError(f"order statistic index {i} outside [1, {self.n}]")
        return float(self.values[i - 1])

    def threshold(self, k: int) -> float:
        """``X_{n-k,n}``."""
        self._check_k(k)
        return float(self.values[self.n - k - 1])

    def _check_k(self, k):
        if not (1 <= k <= self.n - 1):
            raise DomainError(f"k must lie in [1, n-1] = [1, {self.n - 1}], got {k}")

    def _tail_logs(self):
        # cumulative sums of log X_{n,n}, log X_{n-1,n}, ... (descending order)
        if self._cumlog is None:
            top = self.values[::-1]
            with np.errstate(divide="ignore", invalid="ignore"):
                logs = np.log(top)
            self._logs = logs
            self._cumlog = np.cumsum(logs)
        return self._logs, self._cumlog

    def scaled(self, c: float) -> "SortedSample":
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        return SortedSample(self.values * c)


@dataclass(frozen=True)
class EstimationResult:
    gamma_hat: float
    q_hat: float | None
    x_hat: float | None
    k: int
    n: int
    tau: float
    admissible: bool


def _as_sorted(sample) -> SortedSample:
    return sample if isinstance(sample, SortedSample) else SortedSample(sample)


def _hill_many(sample: SortedSample, ks: np.ndarray) -> np.ndarray:
    logs, cum = sample._tail_logs()
    thr = sample.values[sample.n - ks - 1]
    if np.any(thr <= 0):
        bad = int(ks[np.argmax(thr <= 0)])
        raise DomainError(f"threshold X_(n-k,n) must be positive (k={bad})")
    # logs[k] is log X_{n-k,n}
    return cum[ks - 1] / ks - logs[ks]


def hill(sample, k: int) -> float:
    """Hill estimator from the ``k`` largest observations.

    ``mean(log X_{n-i+1,n}, i=1..k) - log X_{n-k,n}``.
    """
    s = _as_sorted(sample)
    s._check_k(k)
    return float(_hill_many(s, np.array([k]))[0])


def weissman_quantile(sample, k: int, tau: float, gamma_hat: float) -> float:
    """Extrapolated quantile ``(k / (n (1 - tau)))**gamma_hat * X_{n-k,n}``."""
    s = _as_sorted(sample)
    s._check_k(k)
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    if s.n * (1.0 - tau) > k:
        raise DomainError(f"n(1 - tau) = {s.n * (1.0 - tau):.6g} exceeds k = {k}; "
                          "this is not an extrapolation")
    return (k / (s.n * (1.0 - tau))) ** gamma_hat * s.threshold(k)


def _beta_factor(g, alpha):
    # (B(1/g - alpha, alpha + 1) / g)**g
    return np.exp(g * (log_beta(1.0 / g - alpha, alpha + 1.0) - np.log(g)))


def shortfall_sweep(sample, ks, tau: float, alpha: float, h1: Distortion | None = None):
    """Vectorised :func:`shortfall_estimate` over many ``k``.

    Returns
    -------
    gamma_hat, x_hat : ndarray
        ``x_hat`` is NaN where ``1/gamma_hat <= alpha``; use the returned
        ``admissible`` mask rather than testing for NaN.
    admissible : ndarray of bool
    """
    s = _as_sorted(sample)
    ks = np.asarray(ks, dtype=int)
    if ks.size and (ks.min() < 1 or ks.max() > s.n - 1):
        raise DomainError(f"k values must lie in [1, {s.n - 1}]")
    if alpha <= 0:
        raise DomainError(f"utility index must be positive, got {alpha}")
    h1 = Distortion.identity() if h1 is None else h1
    level = distortion_inverse(h1, tau)
    g = _hill_many(s, ks)
    adm = (g > 0) & (1.0 / np.where(g > 0, g, 1.0) > alpha)
    x = np.full(g.shape, np.nan)
    if np.any(adm):
        ga, ka = g[adm], ks[adm]
        thr = s.values[s.n - ka - 1]
        x[adm] = (ka / (s.n * (1.0 - level))) ** ga * _beta_factor(ga, alpha) * thr
    return g, x, adm


def shortfall_estimate(sample, k: int, tau: float, alpha: float,
                       h1: Distortion | None = None) -> EstimationResult:
    """Weissman-type estimator of ``x_tau`` when ``u1 = u2`` is a power of index ``alpha``.

    ``x_hat = (k / (n (1 - h1^{-1}(tau))))**g * (B(1/g - alpha, alpha + 1)/g)**g * X_{n-k,n}``
    with ``g`` the Hill estimate. When ``1/g <= alpha`` the shortfall has no
    finite counterpart and the result is flagged inadmissible with
    ``x_hat = None``.
    """
    s = _as_sorted(sample)
    s._check_k(k)
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    h1 = Distortion.identity() if h1 is None else h1
    g, x, adm = shortfall_sweep(s, np.array([k]), tau, alpha, h1)
    g0 = float(g[0])
    level = distortion_inverse(h1, tau)
    q_hat = (k / (s.n * (1.0 - level))) ** g0 * s.threshold(k)
    if not adm[0]:
        return EstimationResult(g0, float(q_hat), None, k, s.n, tau, False)
    return EstimationResult(g0, float(q_hat), float(x[0]), k, s.n, tau, True)
