"""Bessel functions J0, J1 to ~1e-13 absolute accuracy, plus the two-term
large-argument forms used by the analytic decay laws.

Power series below x = 16, evaluated in extended (long double) precision
because the alternating terms grow to ~1e6 before cancelling there; Hankel
asymptotic expansion with 20 coefficients above.  Coefficients are generated
exactly from the Hankel symbol recurrence at import time.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError

_SWITCH = 16.0
_M_MAX = 20
_SERIES_TERMS = 60


def _hankel_coeffs(order: int) -> np.ndarray:
    mu = 4 * order * order
    c = [Fraction(1)]
    for m in range(1, _M_MAX + 1):
        c.append(c[-1] * Fraction(mu - (2 * m - 1) ** 2, 8 * m))
    return np.array([float(v) for v in c])

_HANKEL = {0: _hankel_coeffs(0), 1: _hankel_coeffs(1)}


def _series(order: int, x: np.ndarray) -> np.ndarray:
    xl = x.astype(np.longdouble)
    q = (0.5 * xl) ** 2
    term = np.ones_like(xl) if order == 0 else 0.5 * xl
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = -term * q / np.longdouble(k * (k + order))
        total += term
    return total.astype(np.float64)


def _hankel(order: int, x: np.ndarray) -> np.ndarray:
    c = _HANKEL[order]
    inv_x2 = 1.0 / (x * x)
    P = np.zeros_like(x)
    Q = np.zeros_like(x)
    for m in range(_M_MAX, -1, -1):
        if m % 2 == 0:
            P = P * inv_x2 + ((-1) ** (m // 2)) * c[m]
        else:
            Q = Q * inv_x2 + ((-1) ** ((m - 1) // 2)) * c[m]
    Q /= x
    w = x - np.pi / 4.0 - order * np.pi / 2.0
    return np.sqrt(2.0 / (np.pi * x)) * (P * np.cos(w) - Q * np.sin(w))


def bessel_j(order: int, x):
    """J_order(x) for order in {0, 1}, x >= 0 (scalar or array)."""
    if order not in (0, 1):
        raise DomainError(f"only orders 0 and 1 are implemented, got {order}")
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    out = np.empty_like(x)
    small = x <= _SWITCH
    if small.any():
        out[small] = _series(order, x[small])
    if (~small).any():
        out[~small] = _hankel(order, x[~small])
    return float(out[0]) if scalar else out


def bessel_j_asymptotic(order: int, x):
    """Leading large-x form sqrt(2/(pi x)) cos(x - pi/4 - order pi/2).

    For order 1 this equals sqrt(2/(pi x)) sin(x - pi/4), the form the decay
    laws use with x = 2t.
    """
    if order not in (0, 1):
        raise DomainError(f"only orders 0 and 1 are implemented, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("asymptotic form requires x > 0")
    return np.sqrt(2.0 / (np.pi * x)) * np.cos(x - np.pi / 4.0 - order * np.pi / 2.0)


def j1_over_t(t):
    """J1(2t)/t, regular at t = 0 with limit value 1."""
    scalar = np.isscalar(t)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.ones_like(t)
    nz = t != 0
    out[nz] = bessel_j(1, 2.0 * t[nz]) / t[nz]
    return float(out[0]) if scalar else out
