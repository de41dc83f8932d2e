"""Log-gamma, Beta and the Beta-function constants of the expansions.

Everything here works on floats or numpy arrays. Domain violations raise
:class:`~shortfall.errors.DomainError` (or its subclass
:class:`~shortfall.errors.DivergenceError`) instead of returning NaN.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DivergenceError, DomainError

__all__ = [
    "log_gamma",
    "beta_fn",
    "log_beta",
    "delta0",
    "gamma1_const",
    "gamma2_const",
]

# Lanczos approximation, g = 607/128 with 15 terms (Godfrey's table).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _lanczos(x):
    # valid for x >= 0.5
    z = x - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, _LANCZOS_COEF.size):
        series += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def log_gamma(x):
    """Natural log of the Gamma function for positive arguments.

    Uses a Lanczos approximation, with the reflection formula below 1/2.

    Raises
    ------
    DomainError
        If any argument is not strictly positive (or is NaN).
    """
    arr, scalar = _as_float_array(x)
    if not np.all(arr > 0):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    small = arr < 0.5
    big = ~small
    if np.any(big):
        out[big] = _lanczos(arr[big])
    if np.any(small):
        xs = arr[small]
        # Gamma(x) Gamma(1-x) = pi / sin(pi x); sin(pi x) > 0 on (0, 1/2)
        out[small] = _LOG_PI - np.log(np.sin(np.pi * xs)) - _lanczos(1.0 - xs)
    return float(out[0]) if scalar else out


def log_beta(a, b):
    """``log B(a, b)`` for positive ``a`` and ``b``."""
    a_arr, sa = _as_float_array(a)
    b_arr, sb = _as_float_array(b)
    if not (np.all(a_arr > 0) and np.all(b_arr > 0)):
        raise DomainError(f"Beta function requires a, b > 0, got a={a!r}, b={b!r}")
    res = log_gamma(a_arr) + log_gamma(b_arr) - log_gamma(a_arr + b_arr)
    return float(res) if (sa and sb) else res


def beta_fn(a, b):
    """Beta function ``B(a, b) = int_0^1 z^(a-1) (1-z)^(b-1) dz``.

    Evaluated as ``exp(lgamma(a) + lgamma(b) - lgamma(a+b))``.
    """
    return np.exp(log_beta(a, b)) if np.ndim(a) or np.ndim(b) else math.exp(log_beta(a, b))


def _check_first_order(gamma, alpha1, beta1):
    if gamma <= 0 or alpha1 <= 0 or beta1 <= 0:
        raise DomainError(
            f"need gamma, alpha1, beta1 > 0 (got {gamma}, {alpha1}, {beta1})")
    if beta1 / gamma <= alpha1:
        raise DivergenceError(
            f"beta1/gamma = {beta1 / gamma:.6g} must exceed alpha1 = {alpha1:.6g}; "
            "the shortfall integral diverges otherwise")


def delta0(gamma, alpha1, beta1):
    """Leading constant ``(beta1/gamma) B(beta1/gamma - alpha1, alpha1 + 1)``.

    It is the limit of ``H_{u1,h1}((X-x)_+) / ((1 - h1(F(x))) u1(x))``.
    """
    _check_first_order(gamma, alpha1, beta1)
    r = beta1 / gamma
    value = r * beta_fn(r - alpha1, alpha1 + 1.0)
    # (x+y) B(x, y+1) = y B(x, y) with x = r - alpha1, y = alpha1
    alt = alpha1 * beta_fn(r - alpha1, alpha1)
    assert abs(value - alt) <= 1e-11 * abs(value), (value, alt)
    return value


def gamma1_const(gamma, alpha1, beta1, eta1):
    """Coefficient of the utility auxiliary function ``B1`` in the
    expansion of the shortfall side.

    ``(beta1/gamma) / eta1 * (B(r - alpha1 - eta1, alpha1 + eta1 + 1)
    - B(r - alpha1, alpha1 + 1))`` with ``r = beta1/gamma``.
    """
    _check_first_order(gamma, alpha1, beta1)
    if eta1 >= 0:
        raise DomainError(f"second-order index eta1 must be negative, got {eta1}")
    if alpha1 + eta1 <= 0:
        raise DomainError(f"need alpha1 + eta1 > 0, got {alpha1 + eta1}")
    r = beta1 / gamma
    return r / eta1 * (beta_fn(r - alpha1 - eta1, alpha1 + eta1 + 1.0)
                       - beta_fn(r - alpha1, alpha1 + 1.0))


def gamma2_const(gamma, alpha1, beta1, rho_h):
    """Coefficient of ``A_h`` (second-order function of ``1 - h1(F)``).

    ``((r - rho_h) B(r - alpha1 - rho_h, alpha1 + 1) - r B(r - alpha1, alpha1 + 1))
    / rho_h`` with ``r = beta1/gamma``.
    """
    _check_first_order(gamma, alpha1, beta1)
    if rho_h >= 0:
        raise DomainError(f"rho_h must be negative, got {rho_h}")
    r = beta1 / gamma
    return ((r - rho_h) * beta_fn(r - alpha1 - rho_h, alpha1 + 1.0)
            - r * beta_fn(r - alpha1, alpha1 + 1.0)) / rho_h
